use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::QuantumState;
use crate::error::{Error, Result};
use crate::graph::{is_independent, Graph, IndependentSet};
use crate::rydberg::bitstring;
use crate::solvers::exact_mis;

/// Largest register whose distributions are expanded densely for the
/// readout channel.
pub const DENSE_LIMIT: usize = 24;

/// Per-qubit readout errors, the same for every atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// P(g|r): a Rydberg atom reads as ground.
    pub p_g_given_r: f64,
    /// P(r|g): a ground atom reads as Rydberg.
    pub p_r_given_g: f64,
}

impl ConfusionMatrix {
    pub fn new(p_g_given_r: f64, p_r_given_g: f64) -> Result<Self> {
        for (name, x) in [("P(g|r)", p_g_given_r), ("P(r|g)", p_r_given_g)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::input(format!("{name} = {x} is not a probability")));
            }
        }
        Ok(ConfusionMatrix {
            p_g_given_r,
            p_r_given_g,
        })
    }

    /// Readout values used in the reference experiment.
    pub fn reference() -> Self {
        ConfusionMatrix {
            p_g_given_r: 0.15,
            p_r_given_g: 0.05,
        }
    }
}

/// Probabilities keyed by basis index (bit i = atom i).
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementDistribution {
    pub n: usize,
    pub probs: BTreeMap<u64, f64>,
    /// 0 for an exact distribution.
    pub shots: usize,
}

impl MeasurementDistribution {
    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn get(&self, index: u64) -> f64 {
        self.probs.get(&index).copied().unwrap_or(0.0)
    }

    /// Total-variation distance ½ Σ |p − q|.
    pub fn tv_distance(&self, other: &MeasurementDistribution) -> f64 {
        let keys: std::collections::BTreeSet<_> =
            self.probs.keys().chain(other.probs.keys()).collect();
        0.5 * keys
            .into_iter()
            .map(|&k| (self.get(k) - other.get(k)).abs())
            .sum::<f64>()
    }

    /// Marginal over atoms 0..k, e.g. the vertex atoms of an embedding.
    pub fn project(&self, k: usize) -> Result<MeasurementDistribution> {
        if k > self.n {
            return Err(Error::input(format!(
                "cannot project {} atoms onto {k}",
                self.n
            )));
        }
        let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        let mut probs = BTreeMap::new();
        for (&s, &p) in &self.probs {
            *probs.entry(s & mask).or_insert(0.0) += p;
        }
        Ok(MeasurementDistribution {
            n: k,
            probs,
            shots: self.shots,
        })
    }

    /// CSV "bitstring,probability", rows in ascending basis order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,probability\n");
        for (&s, &p) in &self.probs {
            out.push_str(&format!("{},{}\n", bitstring(s, self.n), p));
        }
        out
    }

    fn dense(&self) -> Result<Vec<f64>> {
        if self.n > DENSE_LIMIT {
            return Err(Error::Resource {
                what: "readout channel atoms",
                size: self.n,
                limit: DENSE_LIMIT,
            });
        }
        let mut v = vec![0.0; 1 << self.n];
        for (&s, &p) in &self.probs {
            v[s as usize] = p;
        }
        Ok(v)
    }

    fn from_dense(n: usize, v: Vec<f64>, shots: usize) -> Self {
        let probs = v
            .into_iter()
            .enumerate()
            .filter(|&(_, p)| p != 0.0)
            .map(|(s, p)| (s as u64, p))
            .collect();
        MeasurementDistribution { n, probs, shots }
    }
}

/// Born distribution when `shots` is 0, otherwise normalized counts of
/// `shots` samples drawn with a seeded ChaCha8 generator.
pub fn measure(state: &QuantumState, shots: usize, seed: u64) -> MeasurementDistribution {
    let born: Vec<f64> = state.amplitudes.iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = born.iter().sum();
    if shots == 0 {
        let v = born.into_iter().map(|p| p / total).collect();
        return MeasurementDistribution::from_dense(state.n, v, 0);
    }
    let sampler = WeightedIndex::new(&born).expect("a normalized state has positive weight");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(sampler.sample(&mut rng) as u64).or_insert(0) += 1;
    }
    MeasurementDistribution {
        n: state.n,
        probs: counts
            .into_iter()
            .map(|(s, c)| (s, c as f64 / shots as f64))
            .collect(),
        shots,
    }
}

/// Applies the readout channel to every bit. Exact distributions go
/// through the tensor-product channel; sampled ones get seeded flips shot
/// by shot, reproducing the counts.
pub fn spam_corrupt(
    d: &MeasurementDistribution,
    c: &ConfusionMatrix,
    seed: u64,
) -> Result<MeasurementDistribution> {
    let (g, r) = (c.p_g_given_r, c.p_r_given_g);
    if d.shots == 0 {
        let mut v = d.dense()?;
        apply_channel(&mut v, d.n, [[1.0 - r, g], [r, 1.0 - g]]);
        return Ok(MeasurementDistribution::from_dense(d.n, v, 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for (&s, &p) in &d.probs {
        let k = (p * d.shots as f64).round() as usize;
        for _ in 0..k {
            let mut out = s;
            for i in 0..d.n {
                let flip = if s >> i & 1 == 1 { g } else { r };
                if rng.gen::<f64>() < flip {
                    out ^= 1 << i;
                }
            }
            *counts.entry(out).or_insert(0) += 1;
        }
    }
    let total: usize = counts.values().sum();
    Ok(MeasurementDistribution {
        n: d.n,
        probs: counts
            .into_iter()
            .map(|(s, k)| (s, k as f64 / total as f64))
            .collect(),
        shots: d.shots,
    })
}

/// Inverts the readout channel factor by factor, clips negative entries to
/// zero and renormalizes.
pub fn spam_correct(
    d: &MeasurementDistribution,
    c: &ConfusionMatrix,
) -> Result<MeasurementDistribution> {
    let (g, r) = (c.p_g_given_r, c.p_r_given_g);
    let det = 1.0 - g - r;
    if det.abs() < 1e-12 {
        return Err(Error::input(
            "confusion matrix is singular: P(g|r) + P(r|g) = 1",
        ));
    }
    let mut v = d.dense()?;
    apply_channel(
        &mut v,
        d.n,
        [[(1.0 - g) / det, -g / det], [-r / det, (1.0 - r) / det]],
    );
    for p in v.iter_mut() {
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.iter_mut().for_each(|p| *p /= total);
    }
    Ok(MeasurementDistribution::from_dense(d.n, v, d.shots))
}

/// v ← m^{⊗n} v, with m[out][in] over the values 0 and 1 of each bit.
fn apply_channel(v: &mut [f64], n: usize, m: [[f64; 2]; 2]) {
    for i in 0..n {
        let bit = 1usize << i;
        for s in 0..v.len() {
            if s & bit == 0 {
                let (p0, p1) = (v[s], v[s | bit]);
                v[s] = m[0][0] * p0 + m[0][1] * p1;
                v[s | bit] = m[1][0] * p0 + m[1][1] * p1;
            }
        }
    }
}

/// Probability mass on maximum independent sets of `g`.
pub fn mis_probability(d: &MeasurementDistribution, g: &Graph) -> Result<f64> {
    if d.n != g.n() {
        return Err(Error::input(format!(
            "distribution covers {} atoms but the graph has {} vertices",
            d.n,
            g.n()
        )));
    }
    let size = exact_mis(g)?.size;
    let mut total = 0.0;
    for (&s, &p) in &d.probs {
        if s.count_ones() as usize == size && is_independent(g, &IndependentSet::from_mask(s))? {
            total += p;
        }
    }
    Ok(total)
}
