//! Embedding-overhead benchmark over random bounded-degree graphs, with
//! log-log power-law fits.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::embed::{check_embedding, embed, overhead_stats, EmbedParams};
use crate::error::{Error, Result};
use crate::graph::erdos_renyi_bounded;

pub const CSV_HEADER: &str = "n,seed,n_plus,total_edge_length,retries,elapsed_ms,valid";

/// Least-squares line in log-log space: y ≈ c·x^alpha.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub c: f64,
    pub alpha: f64,
    pub r_squared: f64,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::input(format!(
            "a power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points
        .iter()
        .find(|&&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()))
    {
        return Err(Error::input(format!(
            "power-law fit needs positive values, got ({x}, {y})"
        )));
    }
    let m = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::input(
            "power-law fit needs at least two distinct x values",
        ));
    }
    let alpha = sxy / sxx;
    let c = (my - alpha * mx).exp();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(PowerLawFit {
        c,
        alpha,
        r_squared,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRecord {
    pub n: usize,
    pub seed: u64,
    pub n_plus: usize,
    pub total_edge_length: usize,
    pub retries: usize,
    pub elapsed_ms: u64,
    /// The embedding was produced and passed every invariant check.
    pub valid: bool,
}

impl ScalingRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.seed,
            self.n_plus,
            self.total_edge_length,
            self.retries,
            self.elapsed_ms,
            self.valid
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeSummary {
    pub n: usize,
    pub samples: usize,
    pub valid: usize,
    pub mean_n_plus: f64,
    pub std_n_plus: f64,
    pub mean_overhead: f64,
    pub std_overhead: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub records: Vec<ScalingRecord>,
    pub sizes: Vec<SizeSummary>,
    /// Mean N₊ against N.
    pub fit_n_plus: Option<PowerLawFit>,
    /// Mean N₊ − N against N.
    pub fit_overhead: Option<PowerLawFit>,
}

impl ScalingReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn all_valid(&self) -> bool {
        self.records.iter().all(|r| r.valid)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingConfig {
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub edge_prob: f64,
    pub seed: u64,
    pub embed: EmbedParams,
    /// Write elapsed_ms = 0 so reruns are byte-identical.
    pub reproducible: bool,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            sizes: vec![10, 20, 30, 40, 50, 60],
            samples: 20,
            edge_prob: 0.5,
            seed: 1,
            embed: EmbedParams::default(),
            reproducible: false,
        }
    }
}

/// Seed of sample `k` at size `n`.
pub fn instance_seed(base: u64, n: usize, k: usize) -> u64 {
    base.wrapping_mul(1_000_003)
        .wrapping_add((n as u64) << 20)
        .wrapping_add(k as u64)
}

/// Generates, embeds and checks `samples` graphs per size. Instances run in
/// parallel; records come back ordered by (n, sample).
pub fn run_scaling(cfg: &ScalingConfig) -> Result<ScalingReport> {
    if cfg.samples == 0 {
        return Err(Error::input("at least one sample per size is needed"));
    }
    if cfg.sizes.is_empty() {
        return Err(Error::input("no sizes given"));
    }
    let jobs: Vec<(usize, u64)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.samples).map(move |k| (n, instance_seed(cfg.seed, n, k))))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(n, seed)| run_instance(n, seed, cfg))
        .collect::<Result<Vec<_>>>()?;

    let mut sizes = Vec::new();
    for &n in &cfg.sizes {
        let rs: Vec<_> = records.iter().filter(|r| r.n == n && r.valid).collect();
        let (mean_n_plus, std_n_plus) = mean_std(rs.iter().map(|r| r.n_plus as f64));
        let (mean_overhead, std_overhead) = mean_std(rs.iter().map(|r| (r.n_plus - r.n) as f64));
        sizes.push(SizeSummary {
            n,
            samples: cfg.samples,
            valid: rs.len(),
            mean_n_plus,
            std_n_plus,
            mean_overhead,
            std_overhead,
        });
    }
    let usable: Vec<_> = sizes.iter().filter(|s| s.valid > 0).collect();
    let fit = |f: &dyn Fn(&SizeSummary) -> f64| {
        fit_power_law(
            &usable
                .iter()
                .map(|s| (s.n as f64, f(s)))
                .collect::<Vec<_>>(),
        )
        .ok()
    };
    let fit_n_plus = fit(&|s| s.mean_n_plus);
    let fit_overhead = fit(&|s| s.mean_overhead);
    Ok(ScalingReport {
        records,
        sizes,
        fit_n_plus,
        fit_overhead,
    })
}

fn run_instance(n: usize, seed: u64, cfg: &ScalingConfig) -> Result<ScalingRecord> {
    let g = erdos_renyi_bounded(n, cfg.edge_prob, 6, seed)?;
    let start = Instant::now();
    let params = EmbedParams {
        seed,
        ..cfg.embed.clone()
    };
    let result = embed(&g, &params);
    let elapsed_ms = if cfg.reproducible {
        0
    } else {
        start.elapsed().as_millis() as u64
    };
    Ok(match result {
        Ok(e) => {
            let s = overhead_stats(&e);
            ScalingRecord {
                n,
                seed,
                n_plus: s.n_plus,
                total_edge_length: s.total_edge_length,
                retries: s.retries,
                elapsed_ms,
                valid: check_embedding(&e).is_empty(),
            }
        }
        Err(e) => {
            log::warn!("n = {n}, seed = {seed}: {e}");
            let retries = match e {
                Error::EmbeddingFailed { retries, .. } => retries,
                _ => cfg.embed.max_retries,
            };
            ScalingRecord {
                n,
                seed,
                n_plus: 0,
                total_edge_length: 0,
                retries,
                elapsed_ms,
                valid: false,
            }
        }
    })
}

fn mean_std(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let xs: Vec<f64> = xs.collect();
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
    (mean, var.sqrt())
}
