//! Two-variable linear programming (combinatorial dimension 2).
//!
//! The objective is fixed to maximizing `x + ε·y` with `ε = 1e-6`, which
//! makes the optimum unique for almost all inputs. To fit the LP-type
//! contract, where adding elements never lowers `f`, the stored value is the
//! negated objective: an unbounded system has value `−∞` and an infeasible
//! one `+∞`.

use itertools::Itertools;

use crate::lptype::{first_basis, values_equal, Basis, ElementId, FValue, LpError, LpType};

use super::ProblemError;

pub const OBJECTIVE_EPSILON: f64 = 1e-6;

/// Half-width of the bounding box used to detect unboundedness. Optima with
/// a coordinate at or beyond this magnitude are reported as unbounded.
pub const BOX_BOUND: f64 = 1e6;

const FEASIBILITY_SLACK: f64 = 1e-9;

/// Constraint `a·x + b·y ≤ c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HalfPlane {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    fn normalized(self) -> Self {
        let s = self.a.hypot(self.b);
        Self::new(self.a / s, self.b / s, self.c / s)
    }

    fn satisfied(&self, x: f64, y: f64) -> bool {
        self.a * x + self.b * y <= self.c + FEASIBILITY_SLACK * self.c.abs().max(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: f64, y: f64, objective: f64 },
    Unbounded,
    Infeasible,
}

impl LpOutcome {
    /// Negated objective, the value used for the LP-type order.
    pub fn value(&self) -> f64 {
        match *self {
            LpOutcome::Optimal { objective, .. } => -objective,
            LpOutcome::Unbounded => f64::NEG_INFINITY,
            LpOutcome::Infeasible => f64::INFINITY,
        }
    }
}

pub fn objective(x: f64, y: f64) -> f64 {
    x + OBJECTIVE_EPSILON * y
}

/// Solves the system by enumerating every pairwise vertex of the constraints
/// together with the bounding box.
pub fn solve(constraints: &[HalfPlane]) -> LpOutcome {
    let boxed = [
        HalfPlane::new(1.0, 0.0, BOX_BOUND),
        HalfPlane::new(-1.0, 0.0, BOX_BOUND),
        HalfPlane::new(0.0, 1.0, BOX_BOUND),
        HalfPlane::new(0.0, -1.0, BOX_BOUND),
    ];
    let all: Vec<HalfPlane> = constraints
        .iter()
        .map(|h| h.normalized())
        .chain(boxed)
        .collect();

    let mut best: Option<(f64, f64, f64)> = None;
    for (i, j) in (0..all.len()).tuple_combinations() {
        let (p, q) = (all[i], all[j]);
        let det = p.a * q.b - p.b * q.a;
        if det.abs() < 1e-12 {
            continue;
        }
        let x = (p.c * q.b - p.b * q.c) / det;
        let y = (p.a * q.c - p.c * q.a) / det;
        if !all.iter().all(|h| h.satisfied(x, y)) {
            continue;
        }
        let obj = objective(x, y);
        if best.is_none_or(|(_, _, b)| obj > b) {
            best = Some((x, y, obj));
        }
    }

    match best {
        None => LpOutcome::Infeasible,
        Some((x, y, _)) if x.abs() >= BOX_BOUND * (1.0 - 1e-9) || y.abs() >= BOX_BOUND * (1.0 - 1e-9) => {
            LpOutcome::Unbounded
        }
        Some((x, y, objective)) => LpOutcome::Optimal { x, y, objective },
    }
}

#[derive(Clone, Debug)]
pub struct Lp2dProblem {
    constraints: Vec<HalfPlane>,
}

impl Lp2dProblem {
    pub fn new(constraints: Vec<HalfPlane>) -> Result<Self, ProblemError> {
        for (i, h) in constraints.iter().enumerate() {
            if !(h.a.is_finite() && h.b.is_finite() && h.c.is_finite()) || (h.a == 0.0 && h.b == 0.0) {
                return Err(ProblemError::DegenerateHalfPlane(i));
            }
        }
        Ok(Self { constraints })
    }

    pub fn constraints(&self) -> &[HalfPlane] {
        &self.constraints
    }

    pub fn solve(&self, support: &[ElementId]) -> Result<LpOutcome, LpError> {
        let hs: Vec<HalfPlane> = support
            .iter()
            .map(|&id| self.constraints.get(id.index()).copied().ok_or(LpError::UnknownElement(id)))
            .collect::<Result<_, _>>()?;
        Ok(solve(&hs))
    }
}

impl LpType for Lp2dProblem {
    fn dim(&self) -> usize {
        2
    }

    fn num_elements(&self) -> usize {
        self.constraints.len()
    }

    fn value(&self, support: &[ElementId]) -> Result<f64, LpError> {
        Ok(self.solve(support)?.value())
    }

    fn optimal_basis(&self, support: &[ElementId]) -> Result<Basis, LpError> {
        let cap = self.enumeration_cap();
        if support.len() > cap {
            return Err(LpError::SmallSetTooLarge { size: support.len(), cap });
        }
        let target = self.value(support)?;
        // a finite optimum is fixed by two constraints, infeasibility by at most three
        for k in 0..=3.min(support.len()) {
            for combo in support.iter().copied().combinations(k) {
                if values_equal(self.value(&combo)?, target) {
                    return Ok(Basis::new(combo.clone(), FValue::new(target, combo)));
                }
            }
        }
        first_basis(self, support)
    }
}

/// `f` for a list of constraints, with ids given by position.
pub fn lp2d_f(constraints: &[HalfPlane]) -> Result<FValue, ProblemError> {
    let problem = Lp2dProblem::new(constraints.to_vec())?;
    let support: Vec<ElementId> = (0..constraints.len() as u32).map(ElementId).collect();
    Ok(problem.eval(&support)?)
}
