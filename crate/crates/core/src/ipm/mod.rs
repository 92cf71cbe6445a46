//! Embedded dense primal–dual interior-point solver for LMI problems.

mod nt;
mod reduce;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sdp::{evaluate, LmiProblem, Solution, Status};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Relative duality-gap tolerance.
    pub tol: f64,
    /// Relative primal/dual infeasibility tolerance.
    pub feastol: f64,
    pub max_iter: usize,
    /// Fraction of the step to the boundary.
    pub step: f64,
    /// Per-iteration log on stderr.
    pub verbose: bool,
    /// Assemble the Schur complement on the rayon pool.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-8, feastol: 1e-8, max_iter: 200, step: 0.98, verbose: false, parallel: true }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.feastol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if !(self.step > 0.0 && self.step < 1.0) {
            return Err(Error::InvalidParameter("step fraction must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

fn failed(problem: &LmiProblem, status: Status, objective: f64, start: Instant) -> Solution {
    Solution {
        x: vec![0.0; problem.m],
        objective,
        dual_objective: None,
        min_eigenvalues: Vec::new(),
        equality_residual: f64::NAN,
        status,
        iterations: 0,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Minimizes `b · x` subject to the LMI blocks and linear equalities.
///
/// Equalities are eliminated first; the reported point is re-checked with
/// [`evaluate`], so `min_eigenvalues` and `equality_residual` are independent
/// of the solver's internal residuals.
pub fn solve(problem: &LmiProblem, config: &SolverConfig) -> Result<Solution> {
    problem.validate()?;
    config.validate()?;
    let start = Instant::now();
    let (reduced, elim) = match reduce::eliminate(problem) {
        reduce::Reduced::Ok(r, e) => (r, e),
        reduce::Reduced::Inconsistent => {
            return Ok(failed(problem, Status::Infeasible, f64::NAN, start))
        }
        reduce::Reduced::Unbounded => {
            return Ok(failed(problem, Status::Infeasible, f64::NEG_INFINITY, start))
        }
    };

    let data = nt::Data::new(&reduced);
    let (z, status, iterations, dual) = if reduced.m == 0 {
        (Vec::new(), Status::Optimal, 0, None)
    } else {
        let out = nt::run(&data, config);
        let pinf = nt::primal_infeasibility(&data, &out.xs);
        let dual = (pinf <= 10.0 * config.feastol)
            .then(|| -nt::primal_objective(&data, &out.xs) + elim.offset);
        (out.y, out.status, out.iterations, dual)
    };
    let x = elim.expand(&z);
    let mut sol = evaluate(problem, &x, config.feastol)?;
    let status = if reduced.m == 0 && sol.status == Status::Infeasible {
        Status::Infeasible
    } else {
        status
    };
    sol.status = status;
    sol.dual_objective = if reduced.m == 0 { Some(sol.objective) } else { dual };
    sol.iterations = iterations;
    sol.seconds = start.elapsed().as_secs_f64();
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{BlockKind, LinearEquality, LmiBlock};

    fn min_x_2x2() -> LmiProblem {
        let mut b = LmiBlock::new(2, BlockKind::Dense, "t");
        b.add(None, 0, 1, 1.0);
        b.add(Some(0), 0, 0, 1.0);
        b.add(Some(0), 1, 1, 1.0);
        let mut p = LmiProblem::new(vec![1.0]);
        p.blocks.push(b);
        p
    }

    #[test]
    fn analytic_two_by_two() {
        let s = solve(&min_x_2x2(), &SolverConfig::default()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-7, "{}", s.x[0]);
        assert!((s.dual_objective.unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn hand_sdp_minus_one() {
        // min y11 over [[1,a,b],[a,1,y11],[b,y11,1]] ⪰ 0
        let mut blk = LmiBlock::new(3, BlockKind::Dense, "m");
        for i in 0..3 {
            blk.add(None, i, i, 1.0);
        }
        blk.add(Some(0), 0, 1, 1.0);
        blk.add(Some(1), 0, 2, 1.0);
        blk.add(Some(2), 1, 2, 1.0);
        let mut p = LmiProblem::new(vec![0.0, 0.0, 1.0]);
        p.blocks.push(blk);
        let s = solve(&p, &SolverConfig::default()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!((s.objective + 1.0).abs() < 1e-7, "{}", s.objective);
    }

    #[test]
    fn equalities_are_respected() {
        // min x0 + 2 x1 s.t. x0, x1 ≥ 0, x0 + x1 = 1
        let mut blk = LmiBlock::new(2, BlockKind::Dense, "d");
        blk.add(Some(0), 0, 0, 1.0);
        blk.add(Some(1), 1, 1, 1.0);
        let mut p = LmiProblem::new(vec![1.0, 2.0]);
        p.blocks.push(blk);
        p.equalities.push(LinearEquality { coeffs: vec![(0, 1.0), (1, 1.0)], rhs: 1.0 });
        let s = solve(&p, &SolverConfig::default()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-7);
        assert!(s.equality_residual < 1e-10);
    }

    #[test]
    fn infeasible_lmi_is_reported() {
        // [[-1, x], [x, -1]] ⪰ 0 has no solution
        let mut blk = LmiBlock::new(2, BlockKind::Dense, "i");
        blk.add(None, 0, 0, -1.0);
        blk.add(None, 1, 1, -1.0);
        blk.add(Some(0), 0, 1, 1.0);
        let mut p = LmiProblem::new(vec![1.0]);
        p.blocks.push(blk);
        let s = solve(&p, &SolverConfig::default()).unwrap();
        assert_ne!(s.status, Status::Optimal);
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let p = min_x_2x2();
        let seq = SolverConfig { parallel: false, ..SolverConfig::default() };
        let a = solve(&p, &seq).unwrap();
        let b = solve(&p, &SolverConfig::default()).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.iterations, b.iterations);
    }
}
