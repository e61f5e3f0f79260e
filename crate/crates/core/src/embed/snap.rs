use std::collections::HashSet;

use super::layout::Layout3D;
use crate::error::{Error, Result};
use crate::geometry::{dist, Point3, Site};

/// Lattice sites of the original vertices, indexed by vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridLayout {
    pub sites: Vec<Site>,
}

impl GridLayout {
    /// Multiplies every coordinate by `k`; clearances scale with it.
    pub fn scaled(&self, k: i64) -> GridLayout {
        GridLayout {
            sites: self.sites.iter().map(|s| s.scaled(k)).collect(),
        }
    }

    pub fn min_chebyshev_gap(&self) -> Option<i64> {
        let s = &self.sites;
        (0..s.len())
            .flat_map(|i| ((i + 1)..s.len()).map(move |j| s[i].chebyshev(s[j])))
            .min()
    }
}

/// Moves each vertex to the nearest lattice point of `layout / scale`.
/// A vertex whose point is taken goes to the nearest free one.
pub fn snap_to_grid(layout: &Layout3D, scale: f64) -> Result<GridLayout> {
    snap_to_grid_with_clearance(layout, scale, 0)
}

/// Like [`snap_to_grid`], but a site counts as taken when it lies within
/// Chebyshev distance `clearance` of an already placed vertex. Vertices are
/// processed in id order; ties between equally near free sites go to the
/// lexicographically smallest.
pub fn snap_to_grid_with_clearance(
    layout: &Layout3D,
    scale: f64,
    clearance: i64,
) -> Result<GridLayout> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::input(format!(
            "grid scale must be positive, got {scale}"
        )));
    }
    let mut placed: Vec<Site> = Vec::with_capacity(layout.positions.len());
    let mut taken: HashSet<Site> = HashSet::new();
    for p in &layout.positions {
        let target: Point3 = [p[0] / scale, p[1] / scale, p[2] / scale];
        let site = nearest_free(target, &taken);
        placed.push(site);
        taken.extend(site.cube(clearance));
    }
    Ok(GridLayout { sites: placed })
}

fn nearest_free(target: Point3, taken: &HashSet<Site>) -> Site {
    let centre = Site::new(
        target[0].round() as i64,
        target[1].round() as i64,
        target[2].round() as i64,
    );
    let mut best: Option<(f64, Site)> = None;
    for r in 0.. {
        for s in centre.cube(r).filter(|s| s.chebyshev(centre) == r) {
            if taken.contains(&s) {
                continue;
            }
            let d = dist(s.to_point(), target);
            let better = match best {
                None => true,
                Some((bd, bs)) => d < bd - 1e-12 || ((d - bd).abs() <= 1e-12 && s < bs),
            };
            if better {
                best = Some((d, s));
            }
        }
        // anything on shell r + 1 is at least r + 0.5 away from the target
        if let Some((d, s)) = best {
            if d <= r as f64 + 0.5 - 1e-12 {
                return s;
            }
        }
    }
    unreachable!("lattice is infinite")
}
