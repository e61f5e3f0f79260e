use num_complex::Complex64;
use rayon::prelude::*;

use super::Schedule;
use crate::error::{Error, Result};
use crate::rydberg::{AtomRegister, InteractionModel, RegisterParams};

/// Largest register the state-vector simulator accepts.
pub const SIMULATOR_LIMIT: usize = 16;

/// Largest phase any rate may accumulate in one step.
pub const MAX_STEP_PHASE: f64 = 0.05;

/// Below this size the generator is applied serially.
const PARALLEL_FROM: usize = 12;

/// Amplitudes over the computational basis, bit i of the index = atom i,
/// 1 = Rydberg.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub n: usize,
    pub amplitudes: Vec<Complex64>,
}

impl QuantumState {
    pub fn ground(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: u64) -> Result<Self> {
        if n > SIMULATOR_LIMIT {
            return Err(Error::Resource {
                what: "state vector atoms",
                size: n,
                limit: SIMULATOR_LIMIT,
            });
        }
        if index >> n != 0 {
            return Err(Error::input(format!(
                "basis index {index} needs more than {n} atoms"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index as usize] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { n, amplitudes })
    }

    /// Normalized state from raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::input(format!(
                "{len} amplitudes is not a power of two"
            )));
        }
        let n = len.trailing_zeros() as usize;
        if n > SIMULATOR_LIMIT {
            return Err(Error::Resource {
                what: "state vector atoms",
                size: n,
                limit: SIMULATOR_LIMIT,
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::input("state has zero or non-finite norm"));
        }
        Ok(QuantumState {
            n,
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn probability(&self, index: u64) -> f64 {
        self.amplitudes[index as usize].norm_sqr()
    }

    /// Population of the Rydberg state of `atom`.
    pub fn excitation(&self, atom: usize) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(s, _)| s >> atom & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// ‖ψ − φ‖₂.
    pub fn distance(&self, other: &QuantumState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Integrates the Schrödinger equation from |0…0⟩ under the schedule with
/// van der Waals interactions for every pair.
pub fn evolve(
    reg: &AtomRegister,
    p: &RegisterParams,
    s: &Schedule,
    dt: f64,
) -> Result<QuantumState> {
    evolve_observed(reg, p, s, dt, |_, _| {})
}

/// As [`evolve`], calling `observer(t, ψ)` at t = 0 and after every step.
pub fn evolve_observed(
    reg: &AtomRegister,
    p: &RegisterParams,
    s: &Schedule,
    dt: f64,
    observer: impl FnMut(f64, &QuantumState),
) -> Result<QuantumState> {
    let psi = QuantumState::ground(reg.len())?;
    evolve_from(psi, reg, p, s, dt, observer)
}

/// Largest step with dt·max(Ω, |Δ + δ_j|, V_max)/ħ ≤ [`MAX_STEP_PHASE`].
pub fn largest_stable_dt(reg: &AtomRegister, p: &RegisterParams, s: &Schedule) -> Result<f64> {
    let v = reg.interactions(p, InteractionModel::FullTails)?;
    let v_max = v.iter().flatten().fold(0.0, |m: f64, &x| m.max(x)) / p.hbar;
    let local_max = reg
        .local_detunings
        .iter()
        .fold(0.0, |m: f64, &d| m.max(d.abs()));
    let rate = s.max_omega().max(s.max_abs_delta() + local_max).max(v_max);
    if rate == 0.0 {
        return Ok(s.duration);
    }
    Ok(MAX_STEP_PHASE / rate)
}

/// Fixed-step fourth-order commutator-free Magnus integrator. Each step
/// applies two exponentials of generator combinations sampled at the Gauss
/// points; each exponential is a Taylor series summed to round-off.
pub fn evolve_from(
    mut psi: QuantumState,
    reg: &AtomRegister,
    p: &RegisterParams,
    s: &Schedule,
    dt: f64,
    mut observer: impl FnMut(f64, &QuantumState),
) -> Result<QuantumState> {
    p.validate()?;
    s.validate()?;
    let n = reg.len();
    if n > SIMULATOR_LIMIT {
        return Err(Error::Resource {
            what: "state vector atoms",
            size: n,
            limit: SIMULATOR_LIMIT,
        });
    }
    if psi.n != n {
        return Err(Error::input(format!(
            "state has {} atoms, register has {n}",
            psi.n
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::input(format!(
            "time step must be positive, got {dt}"
        )));
    }

    let required = largest_stable_dt(reg, p, s)?;
    if dt > required {
        return Err(Error::StepTooCoarse { dt, required });
    }
    let v = reg.interactions(p, InteractionModel::FullTails)?;

    // static diagonal: Σ V n_i n_j / ħ − Σ δ_j n_j
    let dim = 1usize << n;
    let static_diag: Vec<f64> = (0..dim)
        .map(|st| {
            let mut e = 0.0;
            for i in 0..n {
                if st >> i & 1 == 1 {
                    e -= reg.local_detunings[i];
                    for j in (i + 1)..n {
                        if st >> j & 1 == 1 {
                            e += v[i][j] / p.hbar;
                        }
                    }
                }
            }
            e
        })
        .collect();
    let pop: Vec<f64> = (0..dim).map(|st| (st as u32).count_ones() as f64).collect();
    let diag_max = static_diag.iter().fold(0.0, |m: f64, &x| m.max(x.abs()));

    let steps = ((s.duration / dt) - 1e-9).ceil().max(1.0) as usize;
    let h = s.duration / steps as f64;
    let r3 = 3f64.sqrt();
    let (c1, c2) = (0.5 - r3 / 6.0, 0.5 + r3 / 6.0);
    let (a1, a2) = ((3.0 - 2.0 * r3) / 12.0, (3.0 + 2.0 * r3) / 12.0);

    let gen = Generator {
        n,
        static_diag: &static_diag,
        pop: &pop,
        diag_max,
    };
    let mut scratch = Scratch::new(dim);
    observer(0.0, &psi);
    for k in 0..steps {
        let t = k as f64 * h;
        let (o1, d1) = (s.omega(t + c1 * h), s.delta(t + c1 * h));
        let (o2, d2) = (s.omega(t + c2 * h), s.delta(t + c2 * h));
        // exp(h(a1 A1 + a2 A2)) exp(h(a2 A1 + a1 A2)), the right factor first
        gen.exp_apply(
            &mut psi.amplitudes,
            h,
            a2 * o1 + a1 * o2,
            a2 * d1 + a1 * d2,
            &mut scratch,
        );
        gen.exp_apply(
            &mut psi.amplitudes,
            h,
            a1 * o1 + a2 * o2,
            a1 * d1 + a2 * d2,
            &mut scratch,
        );
        observer((k + 1) as f64 * h, &psi);
    }
    Ok(psi)
}

struct Scratch {
    term: Vec<Complex64>,
    next: Vec<Complex64>,
}

impl Scratch {
    fn new(dim: usize) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Scratch {
            term: vec![z; dim],
            next: vec![z; dim],
        }
    }
}

/// A = ½ D₀ − Δ·popcount + (Ω/2) Σ σˣ, the half coming from the weights
/// of the two Gauss points summing to one half.
struct Generator<'a> {
    n: usize,
    static_diag: &'a [f64],
    pop: &'a [f64],
    diag_max: f64,
}

impl Generator<'_> {
    /// ψ ← exp(−i h A) ψ.
    fn exp_apply(&self, psi: &mut [Complex64], h: f64, omega: f64, delta: f64, s: &mut Scratch) {
        let bound = h * (0.5 * self.diag_max + self.n as f64 * (delta.abs() + 0.5 * omega.abs()));
        let pieces = bound.ceil().max(1.0) as usize;
        let tau = h / pieces as f64;
        for _ in 0..pieces {
            s.term.copy_from_slice(psi);
            for k in 1..=60 {
                self.apply(&s.term, &mut s.next, omega, delta);
                let f = Complex64::new(0.0, -tau / k as f64);
                let mut size = 0.0;
                for (t, x) in s.term.iter_mut().zip(&s.next) {
                    *t = x * f;
                    size += t.norm_sqr();
                }
                for (p, t) in psi.iter_mut().zip(&s.term) {
                    *p += t;
                }
                if size < 1e-34 {
                    break;
                }
            }
        }
    }

    /// out ← A x.
    fn apply(&self, x: &[Complex64], out: &mut [Complex64], omega: f64, delta: f64) {
        let half = 0.5 * omega;
        let n = self.n;
        let row = |(st, o): (usize, &mut Complex64)| {
            let mut acc = x[st] * (0.5 * self.static_diag[st] - delta * self.pop[st]);
            if half != 0.0 {
                let mut flip = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    flip += x[st ^ (1 << j)];
                }
                acc += flip * half;
            }
            *o = acc;
        };
        if n >= PARALLEL_FROM {
            out.par_iter_mut().enumerate().for_each(row);
        } else {
            out.iter_mut().enumerate().for_each(row);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anneal::Schedule;
    use std::f64::consts::PI;

    fn unit_params() -> RegisterParams {
        RegisterParams::new(1.0, 1.0, 1.0, 0.0).unwrap()
    }

    fn constant(t: f64, omega: f64, delta: f64) -> Schedule {
        Schedule::new(t, vec![(0.0, omega)], vec![(0.0, delta)]).unwrap()
    }

    #[test]
    fn resonant_pi_pulse() {
        let reg = AtomRegister::uniform(vec![[0.0; 3]]).unwrap();
        let omega = 2.0;
        let psi = evolve(
            &reg,
            &unit_params(),
            &constant(PI / omega, omega, 0.0),
            0.01,
        )
        .unwrap();
        assert!((psi.probability(1) - 1.0).abs() < 1e-6);
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_drive_keeps_populations() {
        let reg = AtomRegister::new(vec![[0.0; 3], [1.0, 0.0, 0.0]], vec![0.3, -0.2]).unwrap();
        let s = Schedule::new(2.0, vec![(0.0, 0.0)], vec![(0.0, -1.0), (2.0, 1.0)]).unwrap();
        let psi = evolve(&reg, &unit_params(), &s, 0.01).unwrap();
        assert!((psi.probability(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn blockade_suppresses_double_excitation() {
        // r = r_b / 2 with r_b = 1, so V = 64 Ω
        let reg = AtomRegister::uniform(vec![[0.0; 3], [0.5, 0.0, 0.0]]).unwrap();
        let p = unit_params();
        let mut worst: f64 = 0.0;
        evolve_observed(
            &reg,
            &p,
            &constant(10.0, 1.0, 0.0),
            0.05 / 64.0,
            |_, psi| {
                worst = worst.max(psi.probability(0b11));
            },
        )
        .unwrap();
        assert!(worst < 0.01, "P(11) reached {worst}");
    }

    #[test]
    fn fourth_order_convergence() {
        let reg = AtomRegister::new(
            vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.1, 0.0]],
            vec![0.2, 0.0, -0.1],
        )
        .unwrap();
        let p = unit_params();
        let s = Schedule::new(
            3.0,
            vec![(0.0, 0.0), (1.0, 2.0), (3.0, 0.5)],
            vec![(0.0, -2.0), (3.0, 2.0)],
        )
        .unwrap();
        let reference = evolve(&reg, &p, &s, 0.05 / 64.0).unwrap();
        let e1 = evolve(&reg, &p, &s, 0.02).unwrap().distance(&reference);
        let e2 = evolve(&reg, &p, &s, 0.01).unwrap().distance(&reference);
        let ratio = e1 / e2;
        assert!(ratio > 12.0 && ratio < 20.0, "error ratio {ratio}");
    }

    #[test]
    fn coarse_step_refused() {
        let reg = AtomRegister::uniform(vec![[0.0; 3], [0.5, 0.0, 0.0]]).unwrap();
        match evolve(&reg, &unit_params(), &constant(1.0, 1.0, 0.0), 0.01) {
            Err(Error::StepTooCoarse { required, .. }) => {
                assert!((required - 0.05 / 64.0).abs() < 1e-15)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn too_many_atoms() {
        let reg = AtomRegister::uniform((0..17).map(|i| [i as f64, 0.0, 0.0]).collect()).unwrap();
        assert!(matches!(
            evolve(&reg, &unit_params(), &constant(1.0, 0.0, 0.0), 0.01),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn parallel_path_matches_serial() {
        // 12 atoms take the parallel branch; a product of single-atom
        // rotations is the exact answer
        let reg =
            AtomRegister::uniform((0..12).map(|i| [100.0 * i as f64, 0.0, 0.0]).collect()).unwrap();
        let omega = 1.0;
        let t = PI / (2.0 * omega);
        let psi = evolve(&reg, &unit_params(), &constant(t, omega, 0.0), 0.01).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-10);
        for i in 0..12 {
            assert!((psi.excitation(i) - 0.5).abs() < 1e-8);
        }
    }
}
