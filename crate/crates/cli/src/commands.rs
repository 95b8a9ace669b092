use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;
use yb_readout::observables::{
    dark_count_correct, dip_hwhm_mhz, fluorescence_spectrum, mot_dip_profile, peak_detuning, pearson_correlation,
    predicted_snr_vs_power, predicted_snr_vs_waist, snr_from_counts, snr_from_totals, spectrum_skewness,
    SpectrumPoint,
};
use yb_readout::transit::{run_ensemble, write_records, write_rows, CountRecord, Format, Simulation};
use yb_readout::{ConfigError, SimConfig, Spin};

use crate::config::{linear_grid, RunConfig};

pub struct RunContext {
    pub cfg: RunConfig,
    pub out_dir: PathBuf,
    pub format: Format,
    pub seed: Option<u64>,
}

impl RunContext {
    fn seed(&self, command: &str) -> Result<u64, ConfigError> {
        self.seed
            .ok_or_else(|| ConfigError::Invalid(format!("`{command}` is stochastic and needs a seed (--seed or `seed` in the config)")))
    }

    fn path(&self, stem: &str, ext: &str) -> PathBuf {
        self.out_dir.join(format!("{stem}.{ext}"))
    }

    fn create(&self, path: &Path) -> Result<BufWriter<File>> {
        std::fs::create_dir_all(&self.out_dir).with_context(|| format!("creating {}", self.out_dir.display()))?;
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        Ok(BufWriter::new(f))
    }

    fn table<T: Serialize>(&self, stem: &str, kind: &str, rows: &[T]) -> Result<()> {
        let path = self.path(stem, self.format.extension());
        let mut out = self.create(&path)?;
        write_rows(&mut out, self.format, kind, rows).with_context(|| format!("writing {}", path.display()))?;
        out.flush()?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }

    fn windows(&self, stem: &str, records: &[CountRecord]) -> Result<()> {
        let path = self.path(stem, self.format.extension());
        let out = self.create(&path)?;
        write_records(out, self.format, records).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }

    fn summary(&self, stem: &str, value: &serde_json::Value) -> Result<()> {
        let path = self.path(stem, "json");
        let mut out = self.create(&path)?;
        serde_json::to_writer_pretty(&mut out, value)?;
        writeln!(out)?;
        out.flush()?;
        println!("{}", serde_json::to_string_pretty(value)?);
        Ok(())
    }
}

fn spectrum_stats(spec: &[SpectrumPoint]) -> serde_json::Value {
    json!({
        "peak_mhz": peak_detuning(spec),
        "skewness": spectrum_skewness(spec),
    })
}

pub fn spectrum(ctx: &RunContext) -> Result<()> {
    let g = &ctx.cfg.grids;
    let grid = linear_grid(g.spectrum_min_mhz, g.spectrum_max_mhz, g.spectrum_step_mhz)?;
    let q = g.quadrature();
    let off_sim = Simulation::new(&ctx.cfg.sim.clone().with_light_shift(false))?;
    let on_sim = Simulation::new(&ctx.cfg.sim.clone().with_light_shift(true))?;
    let off = fluorescence_spectrum(&grid, &off_sim, false, &q)?;
    let on = fluorescence_spectrum(&grid, &on_sim, true, &q)?;
    ctx.table("spectrum_off", "spectrum", &off)?;
    ctx.table("spectrum_on", "spectrum", &on)?;

    let mut extra = Vec::new();
    for &w in &g.spectrum_extra_waists_um {
        let mut c = ctx.cfg.sim.clone().with_light_shift(true);
        c.light_shift.beam.waist_m = w * 1e-6;
        let spec = fluorescence_spectrum(&grid, &Simulation::new(&c)?, true, &q)?;
        ctx.table(&format!("spectrum_on_w{w}um"), "spectrum", &spec)?;
        let mut s = spectrum_stats(&spec);
        s["waist_um"] = json!(w);
        extra.push(s);
    }

    let shift = on_sim.model.peak_shift();
    let peak_shift = match (peak_detuning(&on), peak_detuning(&off)) {
        (Some(a), Some(b)) => Some(a - b),
        _ => None,
    };
    ctx.summary(
        "spectrum_summary",
        &json!({
            "off": spectrum_stats(&off),
            "on": spectrum_stats(&on),
            "peak_shift_mhz": peak_shift,
            "beam_center_shift_mhz": { "m_3_2": shift.delta_32_mhz(), "m_1_2": shift.delta_12_mhz() },
            "extra_waists_same_power": extra,
        }),
    )
}

#[derive(Serialize)]
struct PowerRow {
    initial_spin: Spin,
    power_mw: f64,
    snr: f64,
    counts_per_atom: f64,
}

#[derive(Serialize)]
struct WaistRow {
    initial_spin: Spin,
    waist_um: f64,
    snr: f64,
    counts_per_atom: f64,
}

pub fn snr(ctx: &RunContext) -> Result<()> {
    let g = &ctx.cfg.grids;
    let q = g.quadrature();
    let base = ctx.cfg.sim.clone().with_light_shift(true);
    let mut power_rows = Vec::new();
    let mut waist_rows = Vec::new();
    let mut at_config = serde_json::Map::new();
    let mut monotone = true;
    for spin in [Spin::Up, Spin::Down] {
        let sweep = predicted_snr_vs_power(&g.snr_powers_mw, &base, spin, &q)?;
        monotone &= sweep.windows(2).all(|w| w[1].snr >= w[0].snr);
        power_rows.extend(sweep.iter().map(|p| PowerRow {
            initial_spin: spin,
            power_mw: p.x,
            snr: p.snr,
            counts_per_atom: p.counts_per_atom,
        }));
        let waists = predicted_snr_vs_waist(&g.snr_waists_um, &base, spin, &q)?;
        waist_rows.extend(waists.iter().map(|p| WaistRow {
            initial_spin: spin,
            waist_um: p.x,
            snr: p.snr,
            counts_per_atom: p.counts_per_atom,
        }));
        let here = predicted_snr_vs_power(&[base.light_shift.beam.power_w * 1e3], &base, spin, &q)?[0];
        at_config.insert(
            spin.label().to_string(),
            json!({ "snr": here.snr, "counts_per_atom": here.counts_per_atom }),
        );
    }
    ctx.table("snr_power", "snr_power", &power_rows)?;
    ctx.table("snr_waist", "snr_waist", &waist_rows)?;
    ctx.summary(
        "snr_summary",
        &json!({
            "power_mw": base.light_shift.beam.power_w * 1e3,
            "waist_um": base.light_shift.beam.waist_m * 1e6,
            "at_configured_beam": at_config,
            "nondecreasing_in_power": monotone,
        }),
    )
}

fn window_stats(records: &[CountRecord], spin: Spin) -> serde_json::Value {
    let n = records.len() as f64;
    let pairs: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.counts_sigma_plus as f64, r.counts_sigma_minus as f64))
        .collect();
    json!({
        "windows": records.len(),
        "mean_sigma_plus": pairs.iter().map(|p| p.0).sum::<f64>() / n,
        "mean_sigma_minus": pairs.iter().map(|p| p.1).sum::<f64>() / n,
        "pearson_r": pearson_correlation(&pairs),
        "snr": snr_from_counts(records, spin),
    })
}

pub fn scatter(ctx: &RunContext) -> Result<()> {
    let seed = ctx.seed("scatter")?;
    let n = ctx.cfg.ensembles.scatter_windows;
    let mut summary = serde_json::Map::new();
    for (k, on) in [false, true].into_iter().enumerate() {
        let sim = Simulation::new(&ctx.cfg.sim.clone().with_light_shift(on))?;
        let mut all = Vec::with_capacity(2 * n);
        let mut stats = serde_json::Map::new();
        for (j, spin) in [Spin::Up, Spin::Down].into_iter().enumerate() {
            let recs = run_ensemble(n, sub_seed(seed, 2 * k + j), spin, &sim);
            stats.insert(spin.label().to_string(), window_stats(&recs, spin));
            all.extend(recs);
        }
        let tag = if on { "on" } else { "off" };
        ctx.windows(&format!("scatter_{tag}"), &all)?;
        summary.insert(format!("light_shift_{tag}"), stats.into());
    }
    ctx.summary("scatter_summary", &summary.into())
}

pub fn transit(ctx: &RunContext) -> Result<()> {
    let seed = ctx.seed("transit")?;
    let n = ctx.cfg.ensembles.transit_windows;
    let sim = Simulation::new(&ctx.cfg.sim.clone().with_light_shift(true))?;
    let dark = sim.model.cavity.dark_rates;
    let mut summary = serde_json::Map::new();
    for (j, spin) in [Spin::Up, Spin::Down].into_iter().enumerate() {
        let recs = run_ensemble(n, sub_seed(seed, j), spin, &sim);
        ctx.windows(&format!("transit_{}", spin.label()), &recs)?;
        let mut tot = [0.0; 2];
        let mut signal = 0.0;
        let mut atoms = 0.0;
        for r in &recs {
            tot[0] += r.counts_sigma_plus as f64;
            tot[1] += r.counts_sigma_minus as f64;
            signal += (r.counts_sigma_plus + r.counts_sigma_minus - r.dark_sigma_plus - r.dark_sigma_minus) as f64;
            atoms += r.atom_count as f64;
        }
        let exposure = n as f64 * sim.window;
        let corrected = dark_count_correct(tot, dark, exposure);
        let (d, u) = match spin {
            Spin::Up => (0, 1),
            Spin::Down => (1, 0),
        };
        summary.insert(
            spin.label().to_string(),
            json!({
                "windows": n,
                "mean_atoms_per_window": atoms / n as f64,
                "counts_per_atom": if atoms > 0.0 { Some(signal / atoms) } else { None },
                "snr_raw": snr_from_totals(tot[d], tot[u]),
                "snr_dark_corrected": snr_from_totals(corrected.counts[d], corrected.counts[u]),
            }),
        );
    }
    ctx.summary("transit_summary", &summary.into())
}

pub fn motdip(ctx: &RunContext) -> Result<()> {
    let g = &ctx.cfg.grids;
    let grid = linear_grid(g.dip_min_mhz, g.dip_max_mhz, g.dip_step_mhz)?;
    let mot = &ctx.cfg.mot;
    ctx.table("dip", "dip", &mot_dip_profile(&grid, mot))?;
    ctx.summary(
        "dip_summary",
        &json!({
            "eta": mot.eta(),
            "saturation_parameter": mot.saturation_parameter(),
            "hwhm_mhz": dip_hwhm_mhz(mot),
        }),
    )
}

/// Master seed for sub-ensemble `k` of a command.
fn sub_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(k as u64))
}

pub fn print_defaults() -> Result<()> {
    let cfg = RunConfig {
        sim: SimConfig::default(),
        ..RunConfig::default()
    };
    print!("{}", cfg.to_toml()?);
    Ok(())
}
