/// Pearson correlation of paired samples; `None` with fewer than two pairs
/// or when either coordinate has zero variance.
pub fn pearson_correlation(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Third standardized moment of `values` weighted by `weights`; `None` if
/// the total weight or the variance vanishes.
pub fn skewness(values: &[f64], weights: &[f64]) -> Option<f64> {
    assert_eq!(values.len(), weights.len());
    let w: f64 = weights.iter().sum();
    if w <= 0.0 {
        return None;
    }
    let mean = values.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() / w;
    let (mut m2, mut m3) = (0.0, 0.0);
    for (x, wi) in values.iter().zip(weights) {
        let d = x - mean;
        m2 += wi * d * d;
        m3 += wi * d * d * d;
    }
    m2 /= w;
    m3 /= w;
    (m2 > 0.0).then(|| m3 / m2.powf(1.5))
}

/// Sample mean and standard error of the mean.
pub fn mean_and_sem(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
