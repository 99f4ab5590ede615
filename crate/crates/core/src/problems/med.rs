//! Smallest enclosing disk in the plane (combinatorial dimension 3).

use itertools::Itertools;

use crate::lptype::{values_equal, Basis, ElementId, FValue, LpError, LpType, VALUE_TOLERANCE};

use super::ProblemError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    fn midpoint(self, other: Point2D) -> Point2D {
        Point2D::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub center: Point2D,
    pub radius: f64,
}

impl Disk {
    pub fn point(p: Point2D) -> Self {
        Self { center: p, radius: 0.0 }
    }

    pub fn diameter(a: Point2D, b: Point2D) -> Self {
        let center = a.midpoint(b);
        Self {
            center,
            radius: a.dist(b) / 2.0,
        }
    }

    /// Circumcircle of three points, `None` when they are (nearly) collinear.
    pub fn circumcircle(a: Point2D, b: Point2D, c: Point2D) -> Option<Self> {
        let bx = b.x - a.x;
        let by = b.y - a.y;
        let cx = c.x - a.x;
        let cy = c.y - a.y;
        let det = 2.0 * (bx * cy - by * cx);
        let scale = (bx * bx + by * by).max(cx * cx + cy * cy);
        if det.abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
        let b2 = bx * bx + by * by;
        let c2 = cx * cx + cy * cy;
        let ux = (cy * b2 - by * c2) / det;
        let uy = (bx * c2 - cx * b2) / det;
        let center = Point2D::new(a.x + ux, a.y + uy);
        Some(Self {
            center,
            radius: ux.hypot(uy),
        })
    }

    fn slack(&self) -> f64 {
        VALUE_TOLERANCE * self.radius.max(1.0)
    }

    /// Containment with the value tolerance.
    pub fn contains(&self, p: Point2D) -> bool {
        self.center.dist(p) <= self.radius + self.slack()
    }

    fn strictly_contains(&self, p: Point2D, band: f64) -> bool {
        self.center.dist(p) < self.radius - band
    }
}

/// Exact disk of at most three points, by cases.
pub fn small_disk(points: &[Point2D]) -> Disk {
    match points {
        [] => Disk::point(Point2D::new(0.0, 0.0)),
        [a] => Disk::point(*a),
        [a, b] => Disk::diameter(*a, *b),
        [a, b, c] => {
            for (p, q, r) in [(a, b, c), (a, c, b), (b, c, a)] {
                let d = Disk::diameter(*p, *q);
                if d.contains(*r) {
                    return d;
                }
            }
            Disk::circumcircle(*a, *b, *c).unwrap_or_else(|| {
                // collinear: the farthest pair already contains the third
                [Disk::diameter(*a, *b), Disk::diameter(*a, *c), Disk::diameter(*b, *c)]
                    .into_iter()
                    .max_by(|x, y| x.radius.total_cmp(&y.radius))
                    .unwrap()
            })
        }
        _ => min_disk(points),
    }
}

/// Minimum enclosing disk via the incremental boundary-point recursion.
/// Points are visited in a fixed pseudo-random order so the expected work is
/// linear for any input order.
pub fn min_disk(points: &[Point2D]) -> Disk {
    if points.len() <= 3 {
        return small_disk(points);
    }
    let mut pts = points.to_vec();
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ pts.len() as u64;
    for i in (1..pts.len()).rev() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        let j = (state % (i as u64 + 1)) as usize;
        pts.swap(i, j);
    }

    let mut disk = Disk::point(pts[0]);
    for i in 1..pts.len() {
        if disk.contains(pts[i]) {
            continue;
        }
        let p = pts[i];
        disk = Disk::point(p);
        for j in 0..i {
            if disk.contains(pts[j]) {
                continue;
            }
            let q = pts[j];
            disk = Disk::diameter(p, q);
            for &s in &pts[..j] {
                if disk.contains(s) {
                    continue;
                }
                disk = Disk::circumcircle(p, q, s).unwrap_or_else(|| small_disk(&[p, q, s]));
            }
        }
    }
    disk
}

/// Relative width of the band around the circle inside which points are
/// considered basis candidates.
const BOUNDARY_BAND: f64 = 1e-7;

/// Default cap on support sizes for MED problems.
pub const MED_ENUMERATION_CAP: usize = 1 << 16;

/// Cap on the number of near-boundary points searched for a basis.
const BOUNDARY_CAP: usize = 256;

#[derive(Clone, Debug)]
pub struct MedProblem {
    points: Vec<Point2D>,
    cap: usize,
}

impl MedProblem {
    pub fn new(points: Vec<Point2D>) -> Result<Self, ProblemError> {
        if let Some(i) = points.iter().position(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(ProblemError::NonFinitePoint(i));
        }
        Ok(Self {
            points,
            cap: MED_ENUMERATION_CAP,
        })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn points(&self) -> &[Point2D] {
        &self.points
    }

    pub fn point(&self, id: ElementId) -> Point2D {
        self.points[id.index()]
    }

    fn gather(&self, support: &[ElementId]) -> Result<Vec<Point2D>, LpError> {
        support
            .iter()
            .map(|&id| self.points.get(id.index()).copied().ok_or(LpError::UnknownElement(id)))
            .collect()
    }

    /// Minimum enclosing disk of a support set (origin point disk for ∅).
    pub fn disk(&self, support: &[ElementId]) -> Result<Disk, LpError> {
        Ok(min_disk(&self.gather(support)?))
    }

    fn basis_disk(&self, basis: &Basis) -> Disk {
        let pts: Vec<Point2D> = basis.elements().iter().map(|&id| self.point(id)).collect();
        small_disk(&pts)
    }

    fn shortlex_basis(&self, candidates: &[ElementId], radius: f64) -> Option<Vec<ElementId>> {
        for k in 1..=3 {
            for combo in candidates.iter().copied().combinations(k) {
                let pts: Vec<Point2D> = combo.iter().map(|&id| self.point(id)).collect();
                if values_equal(small_disk(&pts).radius, radius) {
                    return Some(combo);
                }
            }
        }
        None
    }
}

impl LpType for MedProblem {
    fn dim(&self) -> usize {
        3
    }

    fn num_elements(&self) -> usize {
        self.points.len()
    }

    fn enumeration_cap(&self) -> usize {
        self.cap
    }

    fn value(&self, support: &[ElementId]) -> Result<f64, LpError> {
        if support.is_empty() {
            return Ok(0.0);
        }
        Ok(self.disk(support)?.radius)
    }

    fn optimal_basis(&self, support: &[ElementId]) -> Result<Basis, LpError> {
        if support.len() > self.cap {
            return Err(LpError::SmallSetTooLarge {
                size: support.len(),
                cap: self.cap,
            });
        }
        if support.is_empty() {
            return Ok(Basis::new(Vec::new(), FValue::empty(0.0)));
        }
        let disk = self.disk(support)?;
        let band = BOUNDARY_BAND * disk.radius.max(1.0);
        let candidates: Vec<ElementId> = support
            .iter()
            .copied()
            .filter(|&id| !disk.strictly_contains(self.point(id), band))
            .collect();
        if candidates.len() > BOUNDARY_CAP {
            return Err(LpError::SmallSetTooLarge {
                size: candidates.len(),
                cap: BOUNDARY_CAP,
            });
        }
        let elements = self
            .shortlex_basis(&candidates, disk.radius)
            .or_else(|| self.shortlex_basis(support, disk.radius))
            .expect("some subset of at most three points spans the enclosing disk");
        Ok(Basis::new(elements.clone(), FValue::new(disk.radius, elements)))
    }

    fn violates(&self, basis: &Basis, h: ElementId) -> Result<bool, LpError> {
        Ok(self.violation_mask(basis, &[h])?[0])
    }

    fn tight_mask(&self, basis: &Basis, candidates: &[ElementId]) -> Result<Vec<bool>, LpError> {
        if basis.is_empty() {
            return Ok(vec![false; candidates.len()]);
        }
        let disk = self.basis_disk(basis);
        // a disk whose radius ties within tolerance can have its center
        // displaced by about the square root of the tolerance
        let band = 4.0 * VALUE_TOLERANCE.sqrt() * disk.radius.max(1.0);
        candidates
            .iter()
            .map(|&h| {
                let p = *self.points.get(h.index()).ok_or(LpError::UnknownElement(h))?;
                Ok(!basis.contains(h) && !disk.strictly_contains(p, band))
            })
            .collect()
    }

    fn violation_mask(&self, basis: &Basis, candidates: &[ElementId]) -> Result<Vec<bool>, LpError> {
        let disk = if basis.is_empty() { None } else { Some(self.basis_disk(basis)) };
        let mut joined = basis.elements().to_vec();
        candidates
            .iter()
            .map(|&h| {
                let p = *self.points.get(h.index()).ok_or(LpError::UnknownElement(h))?;
                if basis.contains(h) {
                    return Ok(false);
                }
                if let Some(d) = disk {
                    if d.strictly_contains(p, BOUNDARY_BAND * d.radius.max(1.0)) {
                        return Ok(false);
                    }
                }
                joined.truncate(basis.len());
                joined.push(h);
                joined.sort_unstable();
                Ok(self.optimal_basis(&joined)?.fvalue() > basis.fvalue())
            })
            .collect()
    }
}

/// `f` for a list of points, with ids given by position.
pub fn med_f(points: &[Point2D]) -> Result<FValue, ProblemError> {
    let problem = MedProblem::new(points.to_vec())?;
    let support: Vec<ElementId> = (0..points.len() as u32).map(ElementId).collect();
    Ok(problem.eval(&support)?)
}

/// Brute-force ground truth over all 1-, 2- and 3-point candidate disks.
pub mod oracle {
    use super::*;

    fn encloses_all(disk: &Disk, points: &[Point2D]) -> bool {
        points.iter().all(|&p| disk.contains(p))
    }

    /// Smallest radius among candidate disks that contain every point.
    pub fn brute_force_radius(points: &[Point2D]) -> f64 {
        let n = points.len();
        if n == 0 {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for i in 0..n {
            let d = Disk::point(points[i]);
            if d.radius < best && encloses_all(&d, points) {
                best = d.radius;
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let d = Disk::diameter(points[i], points[j]);
                if d.radius < best && encloses_all(&d, points) {
                    best = d.radius;
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if let Some(d) = Disk::circumcircle(points[i], points[j], points[k]) {
                        if d.radius < best && encloses_all(&d, points) {
                            best = d.radius;
                        }
                    }
                }
            }
        }
        best
    }

    /// Full `FValue` with the shortlex-first basis, ids by position.
    pub fn brute_force_fvalue(points: &[Point2D]) -> FValue {
        let radius = brute_force_radius(points);
        if points.is_empty() {
            return FValue::empty(0.0);
        }
        let ids: Vec<usize> = (0..points.len()).collect();
        for k in 1..=3usize.min(points.len()) {
            for combo in ids.iter().copied().combinations(k) {
                let sub: Vec<Point2D> = combo.iter().map(|&i| points[i]).collect();
                if values_equal(brute_force_radius(&sub), radius) {
                    return FValue::new(radius, combo.into_iter().map(|i| ElementId(i as u32)).collect());
                }
            }
        }
        unreachable!("a disk in the plane is spanned by at most three points")
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::*;
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point2D> {
        v.iter().map(|&(x, y)| Point2D::new(x, y)).collect()
    }

    fn ids(v: &[u32]) -> Vec<ElementId> {
        v.iter().copied().map(ElementId).collect()
    }

    #[test]
    fn empty_set_has_radius_zero() {
        let f = med_f(&[]).unwrap();
        assert_eq!(f.value(), 0.0);
        assert!(f.tiebreak().is_empty());
    }

    #[test]
    fn singleton_basis() {
        let p = MedProblem::new(pts(&[(0.0, 0.0)])).unwrap();
        let b = p.optimal_basis(&ids(&[0])).unwrap();
        assert_eq!(b.elements(), &ids(&[0]));
        assert_eq!(b.fvalue().value(), 0.0);
    }

    #[test]
    fn diameter_pair() {
        let f = med_f(&pts(&[(0.0, 0.0), (2.0, 0.0)])).unwrap();
        assert!(values_equal(f.value(), 1.0));
        let d = min_disk(&pts(&[(0.0, 0.0), (2.0, 0.0)]));
        assert!(values_equal(d.center.x, 1.0) && values_equal(d.center.y, 0.0));
    }

    #[test]
    fn interior_third_point_keeps_pair_basis() {
        let points = pts(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.5)]);
        let p = MedProblem::new(points.clone()).unwrap();
        let b = p.optimal_basis(&ids(&[0, 1, 2])).unwrap();
        assert_eq!(b.elements(), &ids(&[0, 1]));
        assert!(values_equal(b.fvalue().value(), 1.0));
        assert_eq!(*b.fvalue(), brute_force_fvalue(&points));
    }

    #[test]
    fn point_on_diameter_circle() {
        let points = pts(&[(0.0, 0.0), (2.0, 0.0), (1.0, 1.0)]);
        let f = med_f(&points).unwrap();
        assert!(values_equal(f.value(), 1.0));
        assert_eq!(f.tiebreak(), &ids(&[0, 1]));
        assert_eq!(f, brute_force_fvalue(&points));
    }

    #[test]
    fn collinear_points_use_extremes() {
        let points = pts(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]);
        let f = med_f(&points).unwrap();
        assert!(values_equal(f.value(), 1.5));
        assert_eq!(f.tiebreak(), &ids(&[0, 2]));
        assert!(values_equal(brute_force_radius(&points), 1.5));
    }

    #[test]
    fn equilateral_triangle_needs_all_three() {
        let h = 3f64.sqrt();
        let points = pts(&[(-1.0, 0.0), (1.0, 0.0), (0.0, h)]);
        let f = med_f(&points).unwrap();
        assert!(values_equal(f.value(), 2.0 / h));
        assert_eq!(f.tiebreak(), &ids(&[0, 1, 2]));
        assert_eq!(f, brute_force_fvalue(&points));
    }

    #[test]
    fn violation_examples() {
        let p = MedProblem::new(pts(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.0), (1.0, 2.0)])).unwrap();
        let b = p.optimal_basis(&ids(&[0, 1])).unwrap();
        assert!(!p.violates(&b, ElementId(2)).unwrap());
        assert!(p.violates(&b, ElementId(3)).unwrap());
        assert!(!p.violates(&b, ElementId(0)).unwrap());
        // every point violates the empty basis
        let empty = p.optimal_basis(&[]).unwrap();
        assert!(p.violates(&empty, ElementId(2)).unwrap());
    }

    #[test]
    fn duplicates_do_not_change_f() {
        let a = med_f(&pts(&[(0.0, 0.0), (2.0, 1.0), (1.0, -1.0)])).unwrap();
        let p = MedProblem::new(pts(&[(0.0, 0.0), (2.0, 1.0), (1.0, -1.0), (2.0, 1.0)])).unwrap();
        let b = p.eval(&ids(&[0, 1, 2])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_non_finite_points() {
        assert!(MedProblem::new(pts(&[(0.0, f64::NAN)])).is_err());
    }

    #[test]
    fn square_corners_prefer_first_diagonal() {
        // four cocircular points: two diagonals both span the disk
        let points = pts(&[(1.0, -1.0), (-1.0, 1.0), (1.0, 1.0), (-1.0, -1.0)]);
        let f = med_f(&points).unwrap();
        assert_eq!(f.tiebreak(), &ids(&[0, 1]));
        assert_eq!(f, brute_force_fvalue(&points));
    }
}
