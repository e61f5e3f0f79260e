//! Fruchterman-Reingold force-directed placement in three dimensions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{dist, Point3};
use crate::graph::Graph;

/// Real-valued vertex positions, indexed by vertex id.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout3D {
    pub positions: Vec<Point3>,
}

/// Runs `iterations` FR steps with ideal edge length 1 and a linearly
/// cooled temperature. Deterministic in `seed`.
pub fn layout_fr3d(g: &Graph, iterations: usize, seed: u64) -> Result<Layout3D> {
    let n = g.n();
    if n == 0 {
        return Err(Error::input("layout needs at least one vertex"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = (n as f64).cbrt();
    let mut pos: Vec<Point3> = (0..n)
        .map(|_| {
            [
                rng.gen_range(-0.5..0.5) * side,
                rng.gen_range(-0.5..0.5) * side,
                rng.gen_range(-0.5..0.5) * side,
            ]
        })
        .collect();

    let k = 1.0_f64;
    let t0 = 0.1 * side.max(1.0);
    let mut disp = vec![[0.0; 3]; n];
    for step in 0..iterations {
        let temperature = t0 * (1.0 - step as f64 / iterations as f64);
        disp.iter_mut().for_each(|d| *d = [0.0; 3]);

        for i in 0..n {
            for j in (i + 1)..n {
                let delta = sub(pos[i], pos[j]);
                let d = norm(delta).max(1e-3);
                let f = k * k / d;
                for a in 0..3 {
                    disp[i][a] += delta[a] / d * f;
                    disp[j][a] -= delta[a] / d * f;
                }
            }
        }
        for &(u, v) in g.edges() {
            let delta = sub(pos[u], pos[v]);
            let d = norm(delta).max(1e-3);
            let f = d * d / k;
            for a in 0..3 {
                disp[u][a] -= delta[a] / d * f;
                disp[v][a] += delta[a] / d * f;
            }
        }
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = norm(*d);
            if len > 0.0 {
                let s = len.min(temperature) / len;
                for a in 0..3 {
                    p[a] += d[a] * s;
                }
            }
        }
    }

    // centre on the origin
    let mut c = [0.0; 3];
    for p in &pos {
        for a in 0..3 {
            c[a] += p[a] / n as f64;
        }
    }
    for p in &mut pos {
        for a in 0..3 {
            p[a] -= c[a];
        }
    }
    Ok(Layout3D { positions: pos })
}

fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: Point3) -> f64 {
    dist(a, [0.0; 3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::k33_plus;

    #[test]
    fn single_vertex_is_finite() {
        let l = layout_fr3d(&Graph::empty(1), 50, 0).unwrap();
        assert!(l.positions[0].iter().all(|c| c.is_finite()));
    }

    #[test]
    fn single_edge_separates() {
        let l = layout_fr3d(&Graph::path(2), 200, 3).unwrap();
        assert!(dist(l.positions[0], l.positions[1]) > 0.1);
    }

    #[test]
    fn adjacent_pairs_sit_closer() {
        let g = k33_plus();
        let l = layout_fr3d(&g, 500, 1).unwrap();
        let (mut adj, mut non) = (Vec::new(), Vec::new());
        for u in 0..g.n() {
            for v in (u + 1)..g.n() {
                let d = dist(l.positions[u], l.positions[v]);
                if g.has_edge(u, v) {
                    adj.push(d)
                } else {
                    non.push(d)
                }
            }
        }
        let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
        assert!(mean(&adj) < mean(&non));
    }

    #[test]
    fn deterministic_in_seed() {
        let g = k33_plus();
        assert_eq!(
            layout_fr3d(&g, 100, 5).unwrap(),
            layout_fr3d(&g, 100, 5).unwrap()
        );
        assert!(layout_fr3d(&Graph::empty(0), 10, 0).is_err());
    }
}
