//! Point sets for the enclosing-disk experiments.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::problems::Point2D;

use super::ExperimentError;

pub const DEFAULT_HULL_PERTURBATION: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DatasetKind {
    DuoDisk,
    TripleDisk,
    Triangle,
    Hull,
}

impl DatasetKind {
    pub const ALL: [DatasetKind; 4] = [Self::DuoDisk, Self::TripleDisk, Self::Triangle, Self::Hull];

    pub fn name(self) -> &'static str {
        match self {
            Self::DuoDisk => "duo-disk",
            Self::TripleDisk => "triple-disk",
            Self::Triangle => "triangle",
            Self::Hull => "hull",
        }
    }

    pub fn min_points(self) -> usize {
        match self {
            Self::DuoDisk => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetKind {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ExperimentError::UnknownDataset(s.to_owned()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    pub n_points: usize,
    pub seed: u64,
    /// Hull only.
    pub perturbation: f64,
}

impl DatasetSpec {
    pub fn new(kind: DatasetKind, n_points: usize, seed: u64) -> Self {
        Self {
            kind,
            n_points,
            seed,
            perturbation: DEFAULT_HULL_PERTURBATION,
        }
    }

    pub fn generate(&self) -> Result<Vec<Point2D>, ExperimentError> {
        if self.n_points < self.kind.min_points() {
            return Err(ExperimentError::TooFewPoints {
                kind: self.kind,
                n: self.n_points,
            });
        }
        Ok(match self.kind {
            DatasetKind::DuoDisk => gen_duo_disk(self.n_points, self.seed),
            DatasetKind::TripleDisk => gen_triple_disk(self.n_points, self.seed),
            DatasetKind::Triangle => gen_triangle(self.n_points, self.seed),
            DatasetKind::Hull => gen_hull(self.n_points, self.seed, self.perturbation),
        })
    }
}

fn uniform_in_disk(rng: &mut ChaCha8Rng) -> Point2D {
    loop {
        let x = rng.gen_range(-1.0..1.0);
        let y = rng.gen_range(-1.0..1.0);
        let p = Point2D::new(x, y);
        if p.norm() < 1.0 {
            return p;
        }
    }
}

/// `(−1, 0)` and `(1, 0)` plus `n − 2` points uniform in the open unit disk.
pub fn gen_duo_disk(n: usize, seed: u64) -> Vec<Point2D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![Point2D::new(-1.0, 0.0), Point2D::new(1.0, 0.0)];
    pts.extend((2..n).map(|_| uniform_in_disk(&mut rng)));
    pts
}

/// Three unit-circle points at 90°, 210° and 330°, plus `n − 3` points
/// uniform in the open unit disk.
pub fn gen_triple_disk(n: usize, seed: u64) -> Vec<Point2D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<Point2D> = [90.0f64, 210.0, 330.0]
        .iter()
        .map(|deg| {
            let a = deg.to_radians();
            Point2D::new(a.cos(), a.sin())
        })
        .collect();
    pts.extend((3..n).map(|_| uniform_in_disk(&mut rng)));
    pts
}

/// Equilateral triangle with side 2 plus `n − 3` points uniform inside it.
pub fn gen_triangle(n: usize, seed: u64) -> Vec<Point2D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 3f64.sqrt();
    let (a, b, c) = (Point2D::new(-1.0, 0.0), Point2D::new(1.0, 0.0), Point2D::new(0.0, h));
    let mut pts = vec![a, b, c];
    pts.extend((3..n).map(|_| loop {
        let (mut u, mut v): (f64, f64) = (rng.gen(), rng.gen());
        if u + v > 1.0 {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        let w = 1.0 - u - v;
        let p = Point2D::new(w * a.x + u * b.x + v * c.x, w * a.y + u * b.y + v * c.y);
        // keep the vertices the only points on the boundary
        if u > 0.0 && v > 0.0 && w > 0.0 {
            break p;
        }
    }));
    pts
}

/// Vertices of the regular `n`-gon on the unit circle, each moved radially
/// and along the circle by at most `perturbation`.
pub fn gen_hull(n: usize, seed: u64, perturbation: f64) -> Vec<Point2D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let (dr, da) = if perturbation > 0.0 {
                (
                    rng.gen_range(-perturbation..=perturbation),
                    rng.gen_range(-perturbation..=perturbation),
                )
            } else {
                (0.0, 0.0)
            };
            let a = 2.0 * PI * k as f64 / n as f64 + da;
            let r = 1.0 + dr;
            Point2D::new(r * a.cos(), r * a.sin())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{med_f, min_disk};

    #[test]
    fn duo_disk_two_points() {
        let pts = gen_duo_disk(2, 0);
        assert_eq!(pts, vec![Point2D::new(-1.0, 0.0), Point2D::new(1.0, 0.0)]);
        assert!((med_f(&pts).unwrap().value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duo_disk_interior_points_are_strictly_inside() {
        let pts = gen_duo_disk(100, 5);
        assert!(pts[2..].iter().all(|p| p.norm() < 1.0));
        let f = med_f(&pts).unwrap();
        assert!((f.value() - 1.0).abs() < 1e-9);
        assert_eq!(f.tiebreak().len(), 2);
    }

    #[test]
    fn triple_disk_circumradius_one() {
        let f = med_f(&gen_triple_disk(3, 0)).unwrap();
        assert!((f.value() - 1.0).abs() < 1e-9);
        let f = med_f(&gen_triple_disk(200, 0)).unwrap();
        assert_eq!(f.tiebreak().len(), 3);
    }

    #[test]
    fn triangle_radius_and_centroid() {
        let f = med_f(&gen_triangle(3, 0)).unwrap();
        assert!((f.value() - 2.0 / 3f64.sqrt()).abs() < 1e-9);
        let pts = gen_triangle(10_000, 3);
        let inner = &pts[3..];
        let mx = inner.iter().map(|p| p.x).sum::<f64>() / inner.len() as f64;
        let my = inner.iter().map(|p| p.y).sum::<f64>() / inner.len() as f64;
        let centroid = Point2D::new(0.0, 3f64.sqrt() / 3.0);
        assert!(Point2D::new(mx, my).dist(centroid) < 0.05);
    }

    #[test]
    fn hull_radius_bounds() {
        let exact = gen_hull(16, 1, 0.0);
        assert!(exact.iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
        for seed in 0..5 {
            let pts = gen_hull(64, seed, 0.01);
            let r = min_disk(&pts).radius;
            assert!((0.99..=1.01).contains(&r), "radius {r}");
            let b = med_f(&pts).unwrap().tiebreak().len();
            assert!(b == 2 || b == 3);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        for kind in DatasetKind::ALL {
            let spec = DatasetSpec::new(kind, 50, 9);
            assert_eq!(spec.generate().unwrap(), spec.generate().unwrap());
        }
    }

    #[test]
    fn too_few_points() {
        assert!(DatasetSpec::new(DatasetKind::Triangle, 2, 0).generate().is_err());
        assert!(DatasetSpec::new(DatasetKind::DuoDisk, 2, 0).generate().is_ok());
        assert_eq!("hull".parse::<DatasetKind>().unwrap(), DatasetKind::Hull);
    }
}
