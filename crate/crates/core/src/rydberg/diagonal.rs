use rayon::prelude::*;

use super::{AtomRegister, InteractionModel, RegisterParams};
use crate::error::{Error, Result};

/// Largest register scanned exhaustively by default.
pub const EXHAUSTIVE_LIMIT: usize = 24;

/// Ground states are kept when within this fraction of the energy scale of
/// the minimum.
const GROUND_TOL: f64 = 1e-9;
/// Looser band used during the incremental scan; survivors are recomputed.
const SCAN_TOL: f64 = 1e-6;
/// Top bits used to split the scan into independent chunks.
const SPLIT_BITS: usize = 6;
const ENERGY_MAP_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalReport {
    pub n: usize,
    pub ground_energy: f64,
    /// Ground states as masks, bit i = atom i, ascending.
    pub ground_states: Vec<u64>,
    /// Energy of every mask, when requested.
    pub energies: Option<Vec<f64>>,
    /// Largest |coefficient| of the energy function; tolerances are relative to it.
    pub energy_scale: f64,
}

impl DiagonalReport {
    pub fn ground_bitstrings(&self) -> Vec<String> {
        self.ground_states
            .iter()
            .map(|&m| bitstring(m, self.n))
            .collect()
    }
}

/// Character i is atom i.
pub fn bitstring(mask: u64, n: usize) -> String {
    (0..n)
        .map(|i| if mask >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub limit: usize,
    pub keep_energies: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            limit: EXHAUSTIVE_LIMIT,
            keep_energies: false,
        }
    }
}

/// Linear and pairwise coefficients: E(z) = Σ a_j z_j + Σ_{i<j} V_ij z_i z_j.
struct Coefficients {
    a: Vec<f64>,
    v: Vec<Vec<f64>>,
    scale: f64,
}

impl Coefficients {
    fn new(reg: &AtomRegister, p: &RegisterParams, model: InteractionModel) -> Result<Self> {
        p.validate()?;
        let a: Vec<f64> = reg
            .local_detunings
            .iter()
            .map(|d| -p.hbar * (p.delta + d))
            .collect();
        let v = reg.interactions(p, model)?;
        let scale = a
            .iter()
            .map(|x| x.abs())
            .chain(v.iter().flatten().copied())
            .fold(f64::MIN_POSITIVE, f64::max);
        Ok(Coefficients { a, v, scale })
    }

    fn energy(&self, z: impl Fn(usize) -> bool) -> f64 {
        let n = self.a.len();
        let mut terms = Vec::new();
        for i in (0..n).filter(|&i| z(i)) {
            terms.push(self.a[i]);
            for j in ((i + 1)..n).filter(|&j| z(j)) {
                terms.push(self.v[i][j]);
            }
        }
        pairwise_sum(&terms)
    }

    fn energy_mask(&self, m: u64) -> f64 {
        self.energy(|i| m >> i & 1 == 1)
    }
}

fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 8 {
        x.iter().sum()
    } else {
        let (l, r) = x.split_at(x.len() / 2);
        pairwise_sum(l) + pairwise_sum(r)
    }
}

/// Energy of `z` relative to the all-ground configuration:
/// −ħ Σ_j (δ + δ_j) z_j + Σ_{i<j} V_ij z_i z_j.
pub fn diagonal_energy(
    reg: &AtomRegister,
    p: &RegisterParams,
    z: &[bool],
    model: InteractionModel,
) -> Result<f64> {
    if z.len() != reg.len() {
        return Err(Error::input(format!(
            "bitstring has {} entries for {} atoms",
            z.len(),
            reg.len()
        )));
    }
    Ok(Coefficients::new(reg, p, model)?.energy(|i| z[i]))
}

pub fn ground_states_diagonal(
    reg: &AtomRegister,
    p: &RegisterParams,
    model: InteractionModel,
) -> Result<DiagonalReport> {
    ground_states_diagonal_with(reg, p, model, ScanOptions::default())
}

/// Exhaustive scan over all 2^N configurations. Chunks over the top bits run
/// in parallel; each walks its low bits in Gray-code order with incremental
/// local fields. Near-minimal candidates are recomputed exactly at the end,
/// so the result does not depend on the chunking.
pub fn ground_states_diagonal_with(
    reg: &AtomRegister,
    p: &RegisterParams,
    model: InteractionModel,
    opts: ScanOptions,
) -> Result<DiagonalReport> {
    let n = reg.len();
    let limit = opts.limit.min(63);
    if n > limit {
        return Err(Error::Resource {
            what: "diagonal scan atom count",
            size: n,
            limit,
        });
    }
    if opts.keep_energies && n > ENERGY_MAP_LIMIT {
        return Err(Error::Resource {
            what: "full energy map atom count",
            size: n,
            limit: ENERGY_MAP_LIMIT,
        });
    }
    let c = Coefficients::new(reg, p, model)?;
    let high = n.min(SPLIT_BITS);
    let low = n - high;

    let candidates: Vec<(f64, Vec<u64>)> = (0..1u64 << high)
        .into_par_iter()
        .map(|h| scan_chunk(&c, h << low, low))
        .collect();
    let approx_min = candidates.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let survivors: Vec<(u64, f64)> = candidates
        .into_iter()
        .filter(|(best, _)| *best <= approx_min + SCAN_TOL * c.scale)
        .flat_map(|(_, masks)| masks)
        .map(|m| (m, c.energy_mask(m)))
        .collect();
    let ground_energy = survivors.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let mut ground_states: Vec<u64> = survivors
        .into_iter()
        .filter(|&(_, e)| e <= ground_energy + GROUND_TOL * c.scale)
        .map(|(m, _)| m)
        .collect();
    ground_states.sort_unstable();

    let energies = opts.keep_energies.then(|| {
        (0..1u64 << n)
            .into_par_iter()
            .map(|m| c.energy_mask(m))
            .collect()
    });
    Ok(DiagonalReport {
        n,
        ground_energy,
        ground_states,
        energies,
        energy_scale: c.scale,
    })
}

/// Scans `base | g` for every Gray code g over the low `low` bits. Returns
/// the smallest energy seen and every mask within the scan band of it.
fn scan_chunk(c: &Coefficients, base: u64, low: usize) -> (f64, Vec<u64>) {
    let n = c.a.len();
    let band = SCAN_TOL * c.scale;
    // field[j]: energy change from exciting j given the others
    let mut field: Vec<f64> = (0..n)
        .map(|j| {
            c.a[j]
                + (0..n)
                    .filter(|&i| i != j && base >> i & 1 == 1)
                    .map(|i| c.v[i][j])
                    .sum::<f64>()
        })
        .collect();
    let mut mask = base;
    let mut e = c.energy_mask(base);
    let mut best = e;
    let mut keep = vec![mask];
    for k in 1..(1u64 << low) {
        let j = k.trailing_zeros() as usize;
        let bit = 1u64 << j;
        let sign = if mask & bit == 0 { 1.0 } else { -1.0 };
        e += sign * field[j];
        mask ^= bit;
        for (i, f) in field.iter_mut().enumerate() {
            if i != j {
                *f += sign * c.v[i][j];
            }
        }
        if e < best - band {
            best = e;
            keep.clear();
            keep.push(mask);
        } else if e <= best + band {
            best = best.min(e);
            keep.push(mask);
        }
    }
    keep.retain(|&m| c.energy_mask(m) <= best + 2.0 * band);
    (best, keep)
}
