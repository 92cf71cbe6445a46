use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexPoly, Exponent, RealPoly};
use crate::error::{Error, Result};
use crate::structure::StructureMode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    /// `g ≥ 0`
    Ge,
    /// `g = 0`
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<P> {
    pub kind: ConstraintKind,
    pub poly: P,
}

impl<P> Constraint<P> {
    pub fn ge(poly: P) -> Self {
        Self { kind: ConstraintKind::Ge, poly }
    }

    pub fn eq(poly: P) -> Self {
        Self { kind: ConstraintKind::Eq, poly }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    #[default]
    #[serde(alias = "minimize")]
    Min,
    #[serde(alias = "maximize")]
    Max,
}

/// Shared surface of real and complex polynomials used by structure detection.
pub trait Polynomial: Clone + std::fmt::Debug + Send + Sync {
    fn n(&self) -> usize;
    fn variables(&self) -> Vec<usize>;
    fn negated(&self) -> Self;
    /// Exponent parities that decide sign symmetry (complex: `β + γ mod 2`).
    fn support_parities(&self) -> Vec<Vec<u8>>;
    /// Variable sets of the individual terms.
    fn term_supports(&self) -> Vec<Vec<usize>>;
    fn flip_signs(&self, s: &[bool]) -> Self;
    fn max_abs_diff(&self, other: &Self) -> f64;
}

impl Polynomial for RealPoly {
    fn n(&self) -> usize {
        RealPoly::n(self)
    }
    fn variables(&self) -> Vec<usize> {
        RealPoly::variables(self)
    }
    fn negated(&self) -> Self {
        self.scale(-1.0)
    }
    fn support_parities(&self) -> Vec<Vec<u8>> {
        self.terms().map(|(e, _)| e.parity()).collect()
    }
    fn term_supports(&self) -> Vec<Vec<usize>> {
        self.terms().map(|(e, _)| e.support().collect()).collect()
    }
    fn flip_signs(&self, s: &[bool]) -> Self {
        RealPoly::flip_signs(self, s)
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        RealPoly::max_abs_diff(self, other)
    }
}

impl Polynomial for ComplexPoly {
    fn n(&self) -> usize {
        ComplexPoly::n(self)
    }
    fn variables(&self) -> Vec<usize> {
        ComplexPoly::variables(self)
    }
    fn negated(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }
    fn support_parities(&self) -> Vec<Vec<u8>> {
        self.terms().map(|(b, g, _)| b.add(g).parity()).collect()
    }
    fn term_supports(&self) -> Vec<Vec<usize>> {
        self.terms()
            .map(|(b, g, _)| b.add(g).support().collect())
            .collect()
    }
    fn flip_signs(&self, s: &[bool]) -> Self {
        ComplexPoly::flip_signs(self, s)
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        ComplexPoly::max_abs_diff(self, other)
    }
}

/// A polynomial optimization problem `inf/sup f(x)` subject to `g_i ≥ 0` / `g_i = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pop<P> {
    pub n: usize,
    pub objective: P,
    pub constraints: Vec<Constraint<P>>,
    pub sense: Sense,
}

pub type RealPop = Pop<RealPoly>;
pub type ComplexPop = Pop<ComplexPoly>;

impl<P: Polynomial> Pop<P> {
    pub fn new(objective: P, constraints: Vec<Constraint<P>>) -> Self {
        Self { n: objective.n(), objective, constraints, sense: Sense::Min }
    }

    pub fn maximize(mut self) -> Self {
        self.sense = Sense::Max;
        self
    }

    /// Objective of the equivalent minimization problem; maximization problems
    /// are negated and their bounds negated back on report.
    pub fn min_objective(&self) -> P {
        match self.sense {
            Sense::Min => self.objective.clone(),
            Sense::Max => self.objective.negated(),
        }
    }

    /// Converts a bound on the minimization form back to the problem's sense.
    pub fn report_bound(&self, min_bound: f64) -> f64 {
        match self.sense {
            Sense::Min => min_bound,
            Sense::Max => -min_bound,
        }
    }

    pub fn constraint_polys(&self) -> Vec<&P> {
        self.constraints.iter().map(|c| &c.poly).collect()
    }
}

impl RealPop {
    pub fn half_degrees(&self) -> super::HalfDegrees {
        super::half_degrees_real(&self.objective, &self.constraint_polys())
    }

    /// Largest violation of the constraints at `x` (0 when feasible).
    pub fn violation(&self, x: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let v = c.poly.eval(x)?;
            worst = worst.max(match c.kind {
                ConstraintKind::Ge => (-v).max(0.0),
                ConstraintKind::Eq => v.abs(),
            });
        }
        Ok(worst)
    }
}

impl ComplexPop {
    pub fn half_degrees(&self) -> Result<super::HalfDegrees> {
        super::half_degrees_complex(&self.objective, &self.constraint_polys())
    }

    pub fn violation(&self, x: &[Complex64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let v = c.poly.eval(x)?.re;
            worst = worst.max(match c.kind {
                ConstraintKind::Ge => (-v).max(0.0),
                ConstraintKind::Eq => v.abs(),
            });
        }
        Ok(worst)
    }
}

/// A problem of either field.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyPop {
    Real(RealPop),
    Complex(ComplexPop),
}

impl AnyPop {
    pub fn n(&self) -> usize {
        match self {
            AnyPop::Real(p) => p.n,
            AnyPop::Complex(p) => p.n,
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, AnyPop::Complex(_))
    }
}

/// Contents of a problem file.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub problem: AnyPop,
    /// User-supplied cliques (0-based variable indices).
    pub cliques: Option<Vec<Vec<usize>>>,
    pub structure: Option<StructureMode>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TermDoc {
    Real(f64, Vec<u32>),
    Complex(f64, f64, Vec<u32>, Vec<u32>),
}

#[derive(Serialize, Deserialize)]
struct ConstraintDoc {
    #[serde(rename = "type")]
    kind: ConstraintKind,
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
struct ProblemDoc {
    field: String,
    n: usize,
    #[serde(default, skip_serializing_if = "is_min")]
    sense: Sense,
    objective: Vec<TermDoc>,
    #[serde(default)]
    constraints: Vec<ConstraintDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cliques: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    structure: Option<StructureMode>,
}

fn is_min(s: &Sense) -> bool {
    *s == Sense::Min
}

fn exponent(n: usize, v: Vec<u32>) -> Result<Exponent> {
    if v.len() != n {
        return Err(Error::ProblemFile(format!(
            "exponent {v:?} has length {} but n = {n}",
            v.len()
        )));
    }
    Ok(Exponent::new(v))
}

fn real_poly(n: usize, terms: Vec<TermDoc>) -> Result<RealPoly> {
    let mut p = RealPoly::zero(n);
    for t in terms {
        match t {
            TermDoc::Real(c, a) => p.add_term(exponent(n, a)?, c),
            TermDoc::Complex(..) => {
                return Err(Error::ProblemFile(
                    "complex term [re, im, beta, gamma] in a real problem".into(),
                ))
            }
        }
    }
    Ok(p)
}

fn complex_poly(n: usize, terms: Vec<TermDoc>) -> Result<ComplexPoly> {
    let mut p = ComplexPoly::zero(n);
    for t in terms {
        match t {
            TermDoc::Complex(re, im, b, g) => {
                p.add_term(exponent(n, b)?, exponent(n, g)?, Complex64::new(re, im))
            }
            TermDoc::Real(..) => {
                return Err(Error::ProblemFile(
                    "real term [coeff, alpha] in a complex problem; use [re, im, beta, gamma]".into(),
                ))
            }
        }
    }
    Ok(p)
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: ProblemDoc = serde_json::from_str(text)?;
        let n = doc.n;
        if n == 0 {
            return Err(Error::ProblemFile("n must be at least 1".into()));
        }
        let problem = match doc.field.as_str() {
            "real" => {
                let objective = real_poly(n, doc.objective)?;
                let constraints = doc
                    .constraints
                    .into_iter()
                    .map(|c| Ok(Constraint { kind: c.kind, poly: real_poly(n, c.terms)? }))
                    .collect::<Result<Vec<_>>>()?;
                AnyPop::Real(Pop { n, objective, constraints, sense: doc.sense })
            }
            "complex" => {
                let objective = complex_poly(n, doc.objective)?;
                objective.check_self_conjugate()?;
                let constraints = doc
                    .constraints
                    .into_iter()
                    .map(|c| {
                        let poly = complex_poly(n, c.terms)?;
                        poly.check_self_conjugate()?;
                        Ok(Constraint { kind: c.kind, poly })
                    })
                    .collect::<Result<Vec<_>>>()?;
                AnyPop::Complex(Pop { n, objective, constraints, sense: doc.sense })
            }
            other => {
                return Err(Error::ProblemFile(format!(
                    "field must be \"real\" or \"complex\", got {other:?}"
                )))
            }
        };
        if let Some(cliques) = &doc.cliques {
            for c in cliques {
                if let Some(&bad) = c.iter().find(|&&i| i >= n) {
                    return Err(Error::ProblemFile(format!(
                        "clique index {bad} out of range for n = {n} (indices are 0-based)"
                    )));
                }
            }
        }
        Ok(Self { problem, cliques: doc.cliques, structure: doc.structure })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn from_problem(problem: AnyPop) -> Self {
        Self { problem, cliques: None, structure: None }
    }

    pub fn to_json(&self) -> Result<String> {
        let real_terms = |p: &RealPoly| {
            p.terms()
                .map(|(e, c)| TermDoc::Real(c, e.entries().to_vec()))
                .collect::<Vec<_>>()
        };
        let complex_terms = |p: &ComplexPoly| {
            p.terms()
                .map(|(b, g, c)| TermDoc::Complex(c.re, c.im, b.entries().to_vec(), g.entries().to_vec()))
                .collect::<Vec<_>>()
        };
        let doc = match &self.problem {
            AnyPop::Real(p) => ProblemDoc {
                field: "real".into(),
                n: p.n,
                sense: p.sense,
                objective: real_terms(&p.objective),
                constraints: p
                    .constraints
                    .iter()
                    .map(|c| ConstraintDoc { kind: c.kind, terms: real_terms(&c.poly) })
                    .collect(),
                cliques: self.cliques.clone(),
                structure: self.structure,
            },
            AnyPop::Complex(p) => ProblemDoc {
                field: "complex".into(),
                n: p.n,
                sense: p.sense,
                objective: complex_terms(&p.objective),
                constraints: p
                    .constraints
                    .iter()
                    .map(|c| ConstraintDoc { kind: c.kind, terms: complex_terms(&c.poly) })
                    .collect(),
                cliques: self.cliques.clone(),
                structure: self.structure,
            },
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_real_binary_problem() {
        let text = r#"{
            "field": "real", "n": 2,
            "objective": [[1.0, [1, 1]]],
            "constraints": [
                {"type": "eq", "terms": [[1.0, [2, 0]], [-1.0, [0, 0]]]},
                {"type": "eq", "terms": [[1.0, [0, 2]], [-1.0, [0, 0]]]}
            ]
        }"#;
        let file = ProblemFile::parse(text).unwrap();
        let AnyPop::Real(p) = &file.problem else { panic!() };
        assert_eq!(p.constraints.len(), 2);
        assert_eq!(p.constraints[0].kind, ConstraintKind::Eq);
        assert_eq!(p.objective.eval(&[2.0, 3.0]).unwrap(), 6.0);
        let back = ProblemFile::parse(&file.to_json().unwrap()).unwrap();
        assert_eq!(back, file);
    }

    #[test]
    fn parse_complex_with_structure() {
        let text = r#"{"field":"complex","n":1,"sense":"max",
            "objective":[[1,0,[1],[1]]],
            "constraints":[{"type":"ge","terms":[[1,0,[0],[0]],[-1,0,[1],[1]]]}],
            "structure":"sign"}"#;
        let file = ProblemFile::parse(text).unwrap();
        assert!(file.problem.is_complex());
        assert_eq!(file.structure, Some(StructureMode::Sign));
    }

    #[test]
    fn rejects_wrong_term_shape() {
        let text = r#"{"field":"complex","n":1,"objective":[[1.0,[1]]],"constraints":[]}"#;
        assert!(ProblemFile::parse(text).is_err());
    }

    #[test]
    fn rejects_non_self_conjugate_constraint() {
        let text = r#"{"field":"complex","n":1,"objective":[[1,0,[1],[1]]],
            "constraints":[{"type":"ge","terms":[[1,0,[1],[0]]]}]}"#;
        assert!(matches!(ProblemFile::parse(text), Err(Error::NotSelfConjugate { .. })));
    }
}
