//! Angular-momentum coupling coefficients (Racah formulas).
//!
//! Arguments are [`Half`]s; coefficients that violate a selection rule or a
//! triangle condition evaluate to zero rather than erroring.

use crate::half::Half;

fn factorial(n: i32) -> f64 {
    debug_assert!(n >= 0);
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Integer value of a sum of half-integers given as twice-values, or `None`
/// if the sum is not a nonnegative integer.
fn nonneg_int(twice: i32) -> Option<i32> {
    (twice >= 0 && twice % 2 == 0).then_some(twice / 2)
}

fn triangle(a: Half, b: Half, c: Half) -> bool {
    let (a, b, c) = (a.twice(), b.twice(), c.twice());
    (a + b + c) % 2 == 0 && c <= a + b && c >= (a - b).abs()
}

fn parity_sign(twice: i32) -> f64 {
    debug_assert!(twice % 2 == 0);
    if (twice / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Clebsch-Gordan coefficient `⟨j1 m1; j2 m2 | j m⟩`.
pub fn clebsch_gordan(j1: Half, m1: Half, j2: Half, m2: Half, j: Half, m: Half) -> f64 {
    if m1 + m2 != m || !triangle(j1, j2, j) {
        return 0.0;
    }
    if m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    let (j1, m1, j2, m2, j, m) = (
        j1.twice(),
        m1.twice(),
        j2.twice(),
        m2.twice(),
        j.twice(),
        m.twice(),
    );
    let f = |twice: i32| factorial(twice / 2);
    let norm = ((j + 1) as f64 * f(j + j1 - j2) * f(j - j1 + j2) * f(j1 + j2 - j)
        / f(j1 + j2 + j + 2))
    .sqrt();
    let prod = (f(j + m) * f(j - m) * f(j1 - m1) * f(j1 + m1) * f(j2 - m2) * f(j2 + m2)).sqrt();

    let mut sum = 0.0;
    let mut k = 0;
    loop {
        let terms = [
            j1 + j2 - j - 2 * k,
            j1 - m1 - 2 * k,
            j2 + m2 - 2 * k,
        ];
        if terms.iter().any(|&t| t < 0) {
            break;
        }
        let lower = [j - j2 + m1 + 2 * k, j - j1 - m2 + 2 * k];
        if lower.iter().all(|&t| t >= 0) {
            let denom = factorial(k)
                * terms.iter().map(|&t| f(t)).product::<f64>()
                * lower.iter().map(|&t| f(t)).product::<f64>();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign / denom;
        }
        k += 1;
    }
    norm * prod * sum
}

fn factorial_int(n: i32) -> i128 {
    debug_assert!(n >= 0);
    (1..=n as i128).product()
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `⟨j1 m1; j2 m2 | j m⟩²` evaluated as an exact fraction before the final
/// division, so that squared coefficients which should sum to a rational
/// round consistently. Limited to small angular momenta (factorials < 2¹²⁷).
pub fn clebsch_gordan_squared(j1: Half, m1: Half, j2: Half, m2: Half, j: Half, m: Half) -> f64 {
    if m1 + m2 != m || !triangle(j1, j2, j) {
        return 0.0;
    }
    if m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    let (j1, m1, j2, m2, j, m) = (
        j1.twice(),
        m1.twice(),
        j2.twice(),
        m2.twice(),
        j.twice(),
        m.twice(),
    );
    let f = |twice: i32| factorial_int(twice / 2);
    let mut num = (j + 1) as i128
        * f(j + j1 - j2)
        * f(j - j1 + j2)
        * f(j1 + j2 - j)
        * f(j + m)
        * f(j - m)
        * f(j1 - m1)
        * f(j1 + m1)
        * f(j2 - m2)
        * f(j2 + m2);
    let mut den = f(j1 + j2 + j + 2);
    let g = gcd(num, den);
    num /= g;
    den /= g;

    // Racah sum as a single fraction s_num / s_den
    let (mut s_num, mut s_den) = (0i128, 1i128);
    let mut k = 0;
    loop {
        let terms = [j1 + j2 - j - 2 * k, j1 - m1 - 2 * k, j2 + m2 - 2 * k];
        if terms.iter().any(|&t| t < 0) {
            break;
        }
        let lower = [j - j2 + m1 + 2 * k, j - j1 - m2 + 2 * k];
        if lower.iter().all(|&t| t >= 0) {
            let d = factorial_int(k) * terms.iter().map(|&t| f(t)).product::<i128>()
                * lower.iter().map(|&t| f(t)).product::<i128>();
            let sign = if k % 2 == 0 { 1 } else { -1 };
            s_num = s_num * d + sign * s_den;
            s_den *= d;
            let g = gcd(s_num, s_den).max(1);
            s_num /= g;
            s_den /= g;
        }
        k += 1;
    }
    let (mut n, mut d) = (num * s_num * s_num, den * s_den * s_den);
    let g = gcd(n, d).max(1);
    n /= g;
    d /= g;
    n as f64 / d as f64
}

/// Wigner 3j symbol.
pub fn three_j(j1: Half, j2: Half, j3: Half, m1: Half, m2: Half, m3: Half) -> f64 {
    if (m1 + m2 + m3) != Half::ZERO {
        return 0.0;
    }
    let sign = parity_sign(j1.twice() - j2.twice() - m3.twice());
    sign / ((j3.twice() + 1) as f64).sqrt() * clebsch_gordan(j1, m1, j2, m2, j3, -m3)
}

fn delta(a: Half, b: Half, c: Half) -> f64 {
    let (a, b, c) = (a.twice(), b.twice(), c.twice());
    let f = |twice: i32| factorial(twice / 2);
    (f(a + b - c) * f(a - b + c) * f(-a + b + c) / f(a + b + c + 2)).sqrt()
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}`.
pub fn six_j(j1: Half, j2: Half, j3: Half, j4: Half, j5: Half, j6: Half) -> f64 {
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if triads.iter().any(|&(a, b, c)| !triangle(a, b, c)) {
        return 0.0;
    }
    let pre: f64 = triads.iter().map(|&(a, b, c)| delta(a, b, c)).product();

    let t = |a: Half, b: Half, c: Half| a.twice() + b.twice() + c.twice();
    let sums = [t(j1, j2, j3), t(j1, j5, j6), t(j4, j2, j6), t(j4, j5, j3)];
    let tops = [
        j1.twice() + j2.twice() + j4.twice() + j5.twice(),
        j2.twice() + j3.twice() + j5.twice() + j6.twice(),
        j3.twice() + j1.twice() + j6.twice() + j4.twice(),
    ];
    let lo = *sums.iter().max().unwrap();
    let hi = *tops.iter().min().unwrap();

    let mut sum = 0.0;
    let mut tt = lo;
    while tt <= hi {
        let n = nonneg_int(tt).expect("6j summation index is integral");
        let mut denom = 1.0;
        for s in sums {
            denom *= factorial((tt - s) / 2);
        }
        for top in tops {
            denom *= factorial((top - tt) / 2);
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * factorial(n + 1) / denom;
        tt += 2;
    }
    pre * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: Half = Half::HALF;
    const ONE: Half = Half::ONE;
    const TH: Half = Half::THREE_HALVES;

    #[test]
    fn stretched_state_coefficient_is_one() {
        assert!((clebsch_gordan(H, H, ONE, ONE, TH, TH) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn known_half_one_coefficients() {
        // ⟨1/2 1/2; 1 0 | 3/2 1/2⟩ = √(2/3), ⟨1/2 1/2; 1 -1 | 3/2 -1/2⟩ = √(1/3)
        let c0 = clebsch_gordan(H, H, ONE, Half::ZERO, TH, H);
        let cm = clebsch_gordan(H, H, ONE, -ONE, TH, -H);
        assert!((c0 * c0 - 2.0 / 3.0).abs() < 1e-14);
        assert!((cm * cm - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn exact_square_matches_float_square() {
        let js = [Half::ZERO, H, ONE, TH, Half::from_int(2)];
        for &j1 in &js {
            for &j2 in &js {
                for &j in &js {
                    for m1 in j1.projections() {
                        for m2 in j2.projections() {
                            let m = m1 + m2;
                            let c = clebsch_gordan(j1, m1, j2, m2, j, m);
                            let c2 = clebsch_gordan_squared(j1, m1, j2, m2, j, m);
                            assert!((c * c - c2).abs() < 1e-14);
                        }
                    }
                }
            }
        }
        assert_eq!(clebsch_gordan_squared(H, -H, ONE, ONE, TH, H), 1.0 / 3.0);
    }

    #[test]
    fn selection_rule_and_triangle_give_zero() {
        assert_eq!(clebsch_gordan(H, H, ONE, ONE, TH, H), 0.0);
        assert_eq!(clebsch_gordan(H, H, H, H, Half::from_int(2), ONE), 0.0);
        assert_eq!(six_j(ONE, ONE, Half::from_int(3), ONE, ONE, ONE), 0.0);
    }

    #[test]
    fn six_j_tabulated_value() {
        // {1 1 1; 1 1 1} = 1/6
        assert!((six_j(ONE, ONE, ONE, ONE, ONE, ONE) - 1.0 / 6.0).abs() < 1e-14);
        // {a b c; b a 0} = (-1)^(a+b+c) / √((2a+1)(2b+1))
        let v = six_j(H, H, ONE, H, H, Half::ZERO);
        assert!((v - 0.5).abs() < 1e-14, "{v}");
    }

    #[test]
    fn three_j_orthogonality() {
        // Σ_{m1,m2} (j1 j2 j3; m1 m2 m3)² = 1/(2 j3 + 1)
        for m3 in TH.projections() {
            let mut s = 0.0;
            for m1 in H.projections() {
                for m2 in ONE.projections() {
                    s += three_j(H, ONE, TH, m1, m2, m3).powi(2);
                }
            }
            assert!((s - 0.25).abs() < 1e-14);
        }
    }
}
