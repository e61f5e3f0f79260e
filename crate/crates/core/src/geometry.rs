//! Points in ℝ³ and lattice sites in ℤ³.

use serde::{Deserialize, Serialize};

pub type Point3 = [f64; 3];

pub fn dist(a: Point3, b: Point3) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// A point of ℤ³. Ordered lexicographically by (x, y, z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

/// The six unit steps, in a fixed order.
pub const AXIS_STEPS: [Site; 6] = [
    Site::new(-1, 0, 0),
    Site::new(1, 0, 0),
    Site::new(0, -1, 0),
    Site::new(0, 1, 0),
    Site::new(0, 0, -1),
    Site::new(0, 0, 1),
];

impl Site {
    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        Site { x, y, z }
    }

    pub fn offset(self, d: Site) -> Site {
        Site::new(self.x + d.x, self.y + d.y, self.z + d.z)
    }

    pub fn scaled(self, k: i64) -> Site {
        Site::new(self.x * k, self.y * k, self.z * k)
    }

    pub fn manhattan(self, o: Site) -> i64 {
        (self.x - o.x).abs() + (self.y - o.y).abs() + (self.z - o.z).abs()
    }

    pub fn chebyshev(self, o: Site) -> i64 {
        (self.x - o.x)
            .abs()
            .max((self.y - o.y).abs())
            .max((self.z - o.z).abs())
    }

    pub fn is_axis_neighbor(self, o: Site) -> bool {
        self.manhattan(o) == 1
    }

    pub fn to_point(self) -> Point3 {
        [self.x as f64, self.y as f64, self.z as f64]
    }

    pub fn axis_neighbors(self) -> impl Iterator<Item = Site> {
        AXIS_STEPS.into_iter().map(move |d| self.offset(d))
    }

    /// All sites within Chebyshev distance `r`, including `self`.
    pub fn cube(self, r: i64) -> impl Iterator<Item = Site> {
        (-r..=r).flat_map(move |dx| {
            (-r..=r).flat_map(move |dy| (-r..=r).map(move |dz| self.offset(Site::new(dx, dy, dz))))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metrics() {
        let a = Site::new(0, 0, 0);
        let b = Site::new(2, -1, 3);
        assert_eq!(a.manhattan(b), 6);
        assert_eq!(a.chebyshev(b), 3);
        assert_eq!(a.cube(1).count(), 27);
        assert_eq!(
            a.axis_neighbors().filter(|s| s.is_axis_neighbor(a)).count(),
            6
        );
        assert!((dist(a.to_point(), [3.0, 4.0, 0.0]) - 5.0).abs() < 1e-15);
    }
}
