use std::path::Path;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use super::LmiProblem;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Optimal,
    MaxIterations,
    Infeasible,
    NumericalFailure,
    /// A point checked by [`evaluate`] that satisfies every constraint.
    Feasible,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::MaxIterations => "max-iterations",
            Status::Infeasible => "infeasible",
            Status::NumericalFailure => "numerical-failure",
            Status::Feasible => "feasible",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution {
    pub x: Vec<f64>,
    /// `b · x`.
    pub objective: f64,
    /// Dual objective when the solver produced a dual certificate.
    pub dual_objective: Option<f64>,
    pub min_eigenvalues: Vec<f64>,
    /// Euclidean norm of `A x − c`.
    pub equality_residual: f64,
    pub status: Status,
    pub iterations: usize,
    pub seconds: f64,
}

impl Solution {
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn min_eigenvalue(m: nalgebra::DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Re-checks a point independently of any solver: objective, per-block
/// minimum eigenvalue and equality residual.
pub fn evaluate(problem: &LmiProblem, x: &[f64], feastol: f64) -> Result<Solution> {
    if x.len() != problem.m {
        return Err(Error::Dimension { expected: problem.m, got: x.len() });
    }
    let min_eigenvalues: Vec<f64> =
        problem.blocks.iter().map(|b| min_eigenvalue(b.instantiate(x))).collect();
    let equality_residual =
        problem.equalities.iter().map(|e| e.residual(x).powi(2)).sum::<f64>().sqrt();
    let feasible = min_eigenvalues.iter().all(|&e| e >= -feastol) && equality_residual <= feastol;
    Ok(Solution {
        x: x.to_vec(),
        objective: problem.objective(x),
        dual_objective: None,
        min_eigenvalues,
        equality_residual,
        status: if feasible { Status::Feasible } else { Status::Infeasible },
        iterations: 0,
        seconds: 0.0,
    })
}

/// Reads a whitespace-separated vector of `m` decimals and evaluates it.
pub fn import_solution_vector(
    path: impl AsRef<Path>,
    problem: &LmiProblem,
    feastol: f64,
) -> Result<Solution> {
    let text = std::fs::read_to_string(path)?;
    let mut x = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        for tok in line.split(|c: char| c.is_whitespace() || c == ',' || c == '{' || c == '}') {
            if tok.is_empty() {
                continue;
            }
            x.push(tok.parse::<f64>().map_err(|e| Error::Parse {
                line: ln + 1,
                message: format!("{tok:?}: {e}"),
            })?);
        }
    }
    evaluate(problem, &x, feastol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{BlockKind, LmiBlock};

    pub(crate) fn min_x_2x2() -> LmiProblem {
        let mut b = LmiBlock::new(2, BlockKind::Dense, "t");
        b.add(None, 0, 1, 1.0);
        b.add(Some(0), 0, 0, 1.0);
        b.add(Some(0), 1, 1, 1.0);
        let mut p = LmiProblem::new(vec![1.0]);
        p.blocks.push(b);
        p
    }

    #[test]
    fn evaluate_examples() {
        let p = min_x_2x2();
        let s = evaluate(&p, &[1.0], 1e-8).unwrap();
        assert!(s.min_eigenvalue().abs() < 1e-12);
        assert_eq!(s.objective, 1.0);
        assert_eq!(s.status, Status::Feasible);
        let s = evaluate(&p, &[2.0], 1e-8).unwrap();
        assert!((s.min_eigenvalue() - 1.0).abs() < 1e-12);
        let s = evaluate(&p, &[0.0], 1e-8).unwrap();
        assert!((s.min_eigenvalue() + 1.0).abs() < 1e-12);
        assert_eq!(s.status, Status::Infeasible);
        assert!(matches!(evaluate(&p, &[0.0, 1.0], 1e-8), Err(Error::Dimension { .. })));
    }

    #[test]
    fn solution_vector_file() {
        let p = min_x_2x2();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.txt");
        std::fs::write(&path, "2.0\n").unwrap();
        let s = import_solution_vector(&path, &p, 1e-8).unwrap();
        assert_eq!(s.objective, 2.0);
        std::fs::write(&path, "1 2").unwrap();
        assert!(matches!(import_solution_vector(&path, &p, 1e-8), Err(Error::Dimension { .. })));
        std::fs::write(&path, "abc").unwrap();
        assert!(matches!(import_solution_vector(&path, &p, 1e-8), Err(Error::Parse { line: 1, .. })));
    }
}
