//! Ancilla placement along routed paths and chain detunings.

use serde::{Deserialize, Serialize};

use super::route::RoutedEdge;
use crate::error::{Error, Result};
use crate::geometry::{dist, Point3, Site};

/// Lower end of the open window for δ_i / U that keeps each chain
/// antiferromagnetic and free of spurious low-energy defects.
pub const DETUNING_WINDOW_LOW: f64 = 1.0 / 64.0 - 1.0 / 729.0;
/// Upper end of the same window.
pub const DETUNING_WINDOW_HIGH: f64 = 63.0 / 64.0;

pub fn in_detuning_window(fraction: f64) -> bool {
    fraction > DETUNING_WINDOW_LOW && fraction < DETUNING_WINDOW_HIGH
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub edge: (usize, usize),
    pub start: Point3,
    pub end: Point3,
    /// Ancilla positions in lattice units, ordered from `start` to `end`.
    pub ancilla_positions: Vec<Point3>,
}

impl Chain {
    pub fn count(&self) -> usize {
        self.ancilla_positions.len()
    }

    /// `start`, ancillas, `end`.
    pub fn polyline(&self) -> Vec<Point3> {
        let mut pts = Vec::with_capacity(self.count() + 2);
        pts.push(self.start);
        pts.extend_from_slice(&self.ancilla_positions);
        pts.push(self.end);
        pts
    }

    /// Distances between consecutive atoms of the polyline.
    pub fn spacings(&self) -> Vec<f64> {
        self.polyline()
            .windows(2)
            .map(|w| dist(w[0], w[1]))
            .collect()
    }

    /// Blockade energy of the weakest bond in the chain, in units of the
    /// nearest-neighbour lattice interaction.
    pub fn bond_energy(&self) -> f64 {
        let widest = self.spacings().into_iter().fold(0.0, f64::max);
        widest.powi(-6)
    }
}

/// Odd path length p puts p − 1 ancillas on the interior lattice points.
/// Even p needs one more atom than there are interior points. Corners and
/// the first and last interior points stay on the lattice; the extra atom is
/// squeezed into a straight stretch between them, whose atoms are then
/// spread evenly. Among the candidate stretches the one whose short-range
/// tails weigh least differently on the two antiferromagnetic patterns wins,
/// then the longest, then the earliest. Paths without a stretch of two or
/// more steps fall back to equal spacing p/(p+1) along the whole path.
pub fn place_ancillas(route: &RoutedEdge) -> Result<Chain> {
    let p = route.length();
    if p < 2 {
        return Err(Error::input(format!(
            "edge {:?} has path length {p}; at least 2 is needed for ancillas",
            route.edge
        )));
    }
    if !route.is_axis_aligned() {
        return Err(Error::input(format!(
            "edge {:?}: path is not a lattice path",
            route.edge
        )));
    }
    let w = &route.waypoints;
    let ancilla_positions = if p % 2 == 1 {
        route.interior().iter().map(|s| s.to_point()).collect()
    } else {
        match squeeze_run(w) {
            Some((a, b)) => squeezed(w, a, b),
            None => {
                let spacing = p as f64 / (p + 1) as f64;
                (1..=p)
                    .map(|k| {
                        let s = k as f64 * spacing;
                        let i = (s.floor() as usize).min(p - 1);
                        lerp(w[i], w[i + 1], s - i as f64)
                    })
                    .collect()
            }
        }
    };
    Ok(Chain {
        edge: route.edge,
        start: w[0].to_point(),
        end: w[p].to_point(),
        ancilla_positions,
    })
}

/// Best straight stretch of waypoints [a, b] with 1 ≤ a, b ≤ p − 1 and
/// b − a ≥ 2, trying each maximal run and the run trimmed by one step.
fn squeeze_run(w: &[Site]) -> Option<(usize, usize)> {
    let p = w.len() - 1;
    let step = |i: usize| {
        (
            w[i + 1].x - w[i].x,
            w[i + 1].y - w[i].y,
            w[i + 1].z - w[i].z,
        )
    };
    let mut runs = Vec::new();
    let mut start = 1;
    for i in 2..=p - 1 {
        if i == p - 1 || step(i) != step(i - 1) {
            runs.push((start, i));
            start = i;
        }
    }
    let mut best: Option<((usize, usize), f64)> = None;
    for (a, b) in runs {
        for (a, b) in [(a, b), (a + 1, b), (a, b - 1)] {
            if b < a + 2 {
                continue;
            }
            let mut poly = vec![w[0].to_point()];
            poly.extend(squeezed(w, a, b));
            poly.push(w[p].to_point());
            let skew = pattern_skew(&poly);
            let better = match best {
                None => true,
                Some(((ba, bb), bs)) => {
                    if (skew - bs).abs() > 1e-9 {
                        skew < bs
                    } else {
                        b - a > bb - ba
                    }
                }
            };
            if better {
                best = Some(((a, b), skew));
            }
        }
    }
    best.map(|(r, _)| r)
}

/// Ancillas for an even path with the stretch [a, b] squeezed.
fn squeezed(w: &[Site], a: usize, b: usize) -> Vec<Point3> {
    let p = w.len() - 1;
    let mut pts = Vec::with_capacity(p);
    pts.extend(w[1..=a].iter().map(|s| s.to_point()));
    let l = b - a;
    pts.extend((1..=l).map(|k| lerp(w[a], w[b], k as f64 / (l + 1) as f64)));
    pts.extend(w[b..p].iter().map(|s| s.to_point()));
    pts
}

/// |E_even − E_odd| over same-parity pairs of a polyline up to four places
/// apart, in units of the lattice interaction.
fn pattern_skew(pts: &[Point3]) -> f64 {
    let mut e = [0.0; 2];
    for i in 0..pts.len() {
        for j in [i + 2, i + 4] {
            if j < pts.len() {
                e[i % 2] += dist(pts[i], pts[j]).powi(-6);
            }
        }
    }
    (e[0] - e[1]).abs()
}
fn lerp(a: Site, b: Site, t: f64) -> Point3 {
    let (a, b) = (a.to_point(), b.to_point());
    [
        a[0] + t * (b[0] - a[0]),
        a[1] + t * (b[1] - a[1]),
        a[2] + t * (b[2] - a[2]),
    ]
}

/// Ancilla detunings, `fraction` times each chain's bond energy, in units of
/// the nearest-neighbour lattice interaction. One entry per ancilla.
pub fn assign_detunings(chains: &[Chain], fraction: f64) -> Result<Vec<Vec<f64>>> {
    if !in_detuning_window(fraction) {
        return Err(Error::input(format!(
            "detuning fraction {fraction} is outside ({DETUNING_WINDOW_LOW:.6}, {DETUNING_WINDOW_HIGH:.6})"
        )));
    }
    Ok(chains
        .iter()
        .map(|c| vec![fraction * c.bond_energy(); c.count()])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn straight(p: i64) -> RoutedEdge {
        RoutedEdge {
            edge: (0, 1),
            waypoints: (0..=p).map(|x| Site::new(x, 0, 0)).collect(),
        }
    }

    #[test]
    fn odd_length_uses_lattice_points() {
        let c = place_ancillas(&straight(3)).unwrap();
        assert_eq!(c.ancilla_positions, vec![[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        assert!(c.spacings().iter().all(|&d| (d - 1.0).abs() < 1e-12));
    }

    #[test]
    fn even_length_spreads_evenly() {
        let c = place_ancillas(&straight(6)).unwrap();
        assert_eq!(c.count(), 6);
        let s = c.spacings();
        assert!((s[0] - 1.0).abs() < 1e-12 && (s[6] - 1.0).abs() < 1e-12);
        assert!(s[1..6].iter().all(|&d| (d - 0.8).abs() < 1e-12));
        let c = place_ancillas(&straight(2)).unwrap();
        assert_eq!(c.count(), 2);
        assert!(c.spacings().iter().all(|&d| (d - 2.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn short_paths_rejected() {
        assert!(place_ancillas(&straight(1)).is_err());
    }

    #[test]
    fn bent_even_chain_stays_connected() {
        let r = RoutedEdge {
            edge: (0, 1),
            waypoints: vec![
                Site::new(0, 0, 0),
                Site::new(1, 0, 0),
                Site::new(2, 0, 0),
                Site::new(3, 0, 0),
                Site::new(3, 1, 0),
            ],
        };
        let c = place_ancillas(&r).unwrap();
        assert_eq!(c.count(), 4);
        assert!(c.spacings().iter().all(|&d| d <= 1.0 + 1e-12));
        // the corner stays on its lattice point
        assert!(c.ancilla_positions.contains(&[3.0, 0.0, 0.0]));
        let poly = c.polyline();
        for i in 0..poly.len() - 2 {
            assert!(dist(poly[i], poly[i + 2]) > 1.2);
        }
    }

    #[test]
    fn squeeze_prefers_inner_segments() {
        // x x | y y y y | x x: the middle run takes the extra atom
        let mut w = vec![Site::new(0, 0, 0)];
        for step in [(1, 0), (1, 0), (0, 1), (0, 1), (0, 1), (0, 1), (1, 0)] {
            let l = *w.last().unwrap();
            w.push(Site::new(l.x + step.0, l.y + step.1, 0));
        }
        let last = *w.last().unwrap();
        w.push(Site::new(last.x + 1, last.y, 0));
        let r = RoutedEdge {
            edge: (0, 1),
            waypoints: w,
        };
        assert_eq!(r.length(), 8);
        let c = place_ancillas(&r).unwrap();
        assert_eq!(c.count(), 8);
        let s = c.spacings();
        assert!(s[..2]
            .iter()
            .chain(&s[7..])
            .all(|&d| (d - 1.0).abs() < 1e-12));
        assert!(s[2..7].iter().all(|&d| (d - 0.8).abs() < 1e-12));
    }

    #[test]
    fn even_chains_have_even_counts() {
        for p in (2..12).step_by(2) {
            assert_eq!(place_ancillas(&straight(p)).unwrap().count(), p as usize);
        }
    }

    #[test]
    fn detunings_follow_weakest_bond() {
        let chains = [
            place_ancillas(&straight(3)).unwrap(),
            place_ancillas(&straight(2)).unwrap(),
        ];
        let d = assign_detunings(&chains, 0.5).unwrap();
        assert_eq!(d[0], vec![0.5, 0.5]);
        let u = 1.5f64.powi(6);
        assert!(d[1].iter().all(|&x| (x - 0.5 * u).abs() < 1e-12));
        assert!(assign_detunings(&chains, 0.99).is_err());
        assert!(assign_detunings(&chains, 0.01).is_err());
        assert!(assign_detunings(&chains, 0.015).is_ok());
    }
}
