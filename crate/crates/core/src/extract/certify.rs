use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::poly::{ComplexPop, Constraint, ConstraintKind, Polynomial, Pop, RealPop, Sense};

/// One candidate minimizer with its objective value and worst constraint violation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomReport {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
    pub objective: f64,
    pub violation: f64,
    /// Objective minus bound for minimization, bound minus objective for maximization.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub bound: f64,
    pub atoms: Vec<AtomReport>,
    pub certified: bool,
    /// Smallest gap over feasible atoms, if any atom is feasible.
    pub best_gap: Option<f64>,
}

fn gap(sense: Sense, bound: f64, value: f64) -> f64 {
    match sense {
        Sense::Min => value - bound,
        Sense::Max => bound - value,
    }
}

fn finish(bound: f64, atoms: Vec<AtomReport>, tol: f64) -> Certificate {
    let best_gap = atoms
        .iter()
        .filter(|a| a.violation <= tol)
        .map(|a| a.gap)
        .min_by(f64::total_cmp);
    let certified = best_gap.is_some_and(|g| g <= tol * bound.abs().max(1.0));
    Certificate { bound, atoms, certified, best_gap }
}

fn violation<P: Polynomial>(pop: &Pop<P>, value: impl Fn(&P) -> f64) -> f64 {
    pop.constraints
        .iter()
        .map(|Constraint { poly, kind }| {
            let v = value(poly);
            match kind {
                ConstraintKind::Ge => (-v).max(0.0),
                ConstraintKind::Eq => v.abs(),
            }
        })
        .fold(0.0, f64::max)
}

/// Certificate for real atoms against a bound reported in the problem's sense.
pub fn certify_real(bound: f64, atoms: &[Vec<f64>], pop: &RealPop, tol: f64) -> Certificate {
    let reports = atoms
        .iter()
        .map(|x| {
            let eval = |p: &crate::poly::RealPoly| p.eval(x).unwrap_or(f64::NAN);
            let objective = eval(&pop.objective);
            AtomReport {
                re: x.clone(),
                im: None,
                objective,
                violation: violation(pop, eval),
                gap: gap(pop.sense, bound, objective),
            }
        })
        .collect();
    finish(bound, reports, tol)
}

/// Certificate for complex atoms; polynomial values are read through their real part.
pub fn certify_complex(bound: f64, atoms: &[Vec<Complex64>], pop: &ComplexPop, tol: f64) -> Certificate {
    let reports = atoms
        .iter()
        .map(|z| {
            let eval = |p: &crate::poly::ComplexPoly| p.eval_real(z).unwrap_or(f64::NAN);
            let objective = eval(&pop.objective);
            AtomReport {
                re: z.iter().map(|c| c.re).collect(),
                im: Some(z.iter().map(|c| c.im).collect()),
                objective,
                violation: violation(pop, eval),
                gap: gap(pop.sense, bound, objective),
            }
        })
        .collect();
    finish(bound, reports, tol)
}
