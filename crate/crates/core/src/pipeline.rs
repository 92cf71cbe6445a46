//! End-to-end workflow: assemble a relaxation, realize it, solve it, and try
//! to extract and certify minimizers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{
    certify_complex, certify_real, extract_from_moments, Certificate, ExtractOptions,
    ExtractionReport,
};
use crate::ipm::{solve, SolverConfig};
use crate::moment::{
    assemble_las_complex, assemble_las_real, assemble_slas_complex, assemble_slas_real,
    ComplexRelaxation, RealRelaxation,
};
use crate::poly::{AnyPop, ComplexPop, RealPop};
use crate::sdp::{moment_lookup, realize, LmiProblem, Solution, Status, VariableMap};

use crate::structure::{
    apply_sign_symmetry, assemble_cs_complex, assemble_cs_real, decompose, sign_symmetries,
    CsShift, StructureMode,
};

/// Which relaxation to build.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxationSpec {
    pub r: usize,
    /// Shift-block order; `None` gives plain LAS.
    pub s: Option<usize>,
    pub structure: StructureMode,
    /// User cliques (0-based); detected when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cliques: Option<Vec<Vec<usize>>>,
    /// Real cs only: order-`s` shift blocks per clique instead of global order-1 blocks.
    #[serde(default)]
    pub clique_local: bool,
}

impl RelaxationSpec {
    pub fn las(r: usize) -> Self {
        Self { r, s: None, structure: StructureMode::Dense, cliques: None, clique_local: false }
    }

    pub fn slas(r: usize, s: usize) -> Self {
        Self { s: Some(s), ..Self::las(r) }
    }

    pub fn with_structure(mut self, structure: StructureMode) -> Self {
        self.structure = structure;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnyRelaxation {
    Real(RealRelaxation),
    Complex(ComplexRelaxation),
}

/// Size summary of an assembled relaxation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxationStats {
    pub field: String,
    pub method: String,
    pub structure: StructureMode,
    pub r: usize,
    pub moments: usize,
    pub blocks: Vec<usize>,
    pub equalities: usize,
}

impl AnyRelaxation {
    pub fn realize(&self) -> Result<(LmiProblem, VariableMap)> {
        match self {
            AnyRelaxation::Real(rel) => realize(rel),
            AnyRelaxation::Complex(rel) => realize(rel),
        }
    }

    pub fn stats(&self) -> RelaxationStats {
        macro_rules! stats {
            ($rel:expr, $field:expr) => {
                RelaxationStats {
                    field: $field.into(),
                    method: $rel.meta.method.to_string(),
                    structure: $rel.meta.structure,
                    r: $rel.meta.r,
                    moments: $rel.catalog.len(),
                    blocks: $rel.block_dims(),
                    equalities: $rel.equalities.len(),
                }
            };
        }
        match self {
            AnyRelaxation::Real(rel) => stats!(rel, "real"),
            AnyRelaxation::Complex(rel) => stats!(rel, "complex"),
        }
    }
}

pub fn build_real(pop: &RealPop, spec: &RelaxationSpec) -> Result<RealRelaxation> {
    let rel = if spec.structure.uses_cliques() {
        let cliques = decompose(pop, spec.cliques.as_deref())?;
        let shift = match (spec.s, spec.clique_local) {
            (None, _) => CsShift::None,
            (Some(_), false) => CsShift::Global,
            (Some(s), true) => CsShift::CliqueLocal(s),
        };
        assemble_cs_real(pop, spec.r, &cliques, shift)?
    } else {
        match spec.s {
            None => assemble_las_real(pop, spec.r)?,
            Some(s) => assemble_slas_real(pop, spec.r, s)?,
        }
    };
    Ok(if spec.structure.uses_sign() { apply_sign_symmetry(rel, &sign_symmetries(pop)) } else { rel })
}

pub fn build_complex(pop: &ComplexPop, spec: &RelaxationSpec) -> Result<ComplexRelaxation> {
    let rel = if spec.structure.uses_cliques() {
        let cliques = decompose(pop, spec.cliques.as_deref())?;
        assemble_cs_complex(pop, spec.r, spec.s, &cliques)?
    } else {
        match spec.s {
            None => assemble_las_complex(pop, spec.r)?,
            Some(s) => assemble_slas_complex(pop, spec.r, s)?,
        }
    };
    Ok(if spec.structure.uses_sign() { apply_sign_symmetry(rel, &sign_symmetries(pop)) } else { rel })
}

pub fn build(problem: &AnyPop, spec: &RelaxationSpec) -> Result<AnyRelaxation> {
    if spec.r == 0 {
        return Err(Error::InvalidParameter("relaxation order r must be at least 1".into()));
    }
    Ok(match problem {
        AnyPop::Real(p) => AnyRelaxation::Real(build_real(p, spec)?),
        AnyPop::Complex(p) => AnyRelaxation::Complex(build_complex(p, spec)?),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub solver: SolverConfig,
    /// Attempt atom extraction after an optimal solve (dense structure only).
    pub extract: Option<ExtractOptions>,
    /// Feasibility and gap tolerance of the certificate.
    pub cert_tol: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { solver: SolverConfig::default(), extract: Some(ExtractOptions::default()), cert_tol: 1e-4 }
    }
}

/// Outcome of one relaxation solve, in the problem's optimization sense.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub spec: RelaxationSpec,
    pub stats: RelaxationStats,
    /// Variables of the real LMI after elimination.
    pub m: usize,
    pub bound: f64,
    pub status: Status,
    pub iterations: usize,
    pub seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extraction: Option<ExtractionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extraction_error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

#[allow(clippy::too_many_arguments)]
fn extract_and_certify(
    problem: &AnyPop,
    rel: &AnyRelaxation,
    map: &VariableMap,
    x: &[f64],
    bound: f64,
    r: usize,
    opts: &ExtractOptions,
    tol: f64,
) -> Result<(ExtractionReport, Certificate)> {
    match (problem, rel) {
        (AnyPop::Real(pop), AnyRelaxation::Real(rel)) => {
            let (atoms, rep) = extract_from_moments::<f64>(moment_lookup(rel, map, x), pop.n, r, opts)?;
            Ok((rep, certify_real(bound, &atoms, pop, tol)))
        }
        (AnyPop::Complex(pop), AnyRelaxation::Complex(rel)) => {
            let (atoms, rep) =
                extract_from_moments::<Complex64>(moment_lookup(rel, map, x), pop.n, r, opts)?;
            Ok((rep, certify_complex(bound, &atoms, pop, tol)))
        }
        _ => unreachable!("relaxation field follows the problem field"),
    }
}

/// Minimal relaxation order of a problem.
pub fn minimal_order(problem: &AnyPop) -> Result<usize> {
    Ok(match problem {
        AnyPop::Real(p) => p.half_degrees().d_min,
        AnyPop::Complex(p) => p.half_degrees()?.d_min,
    }
    .max(1))
}

/// An assembled and realized relaxation, ready to solve or export.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub relaxation: AnyRelaxation,
    pub lmi: LmiProblem,
    pub map: VariableMap,
}

pub fn prepare(problem: &AnyPop, spec: &RelaxationSpec) -> Result<Prepared> {
    let relaxation = build(problem, spec)?;
    let (lmi, map) = relaxation.realize()?;
    Ok(Prepared { relaxation, lmi, map })
}

/// Report for a point of the realized LMI (from the embedded solver or an
/// imported solution). Extraction runs for dense relaxations whose point is
/// optimal or, when imported, feasible.
pub fn report(
    problem: &AnyPop,
    spec: &RelaxationSpec,
    prepared: &Prepared,
    sol: &Solution,
    opts: &PipelineOptions,
) -> SolveReport {
    let min_bound = prepared.map.bound(sol.objective);
    let bound = match problem {
        AnyPop::Real(p) => p.report_bound(min_bound),
        AnyPop::Complex(p) => p.report_bound(min_bound),
    };
    let mut out = SolveReport {
        spec: spec.clone(),
        stats: prepared.relaxation.stats(),
        m: prepared.lmi.m,
        bound,
        status: sol.status,
        iterations: sol.iterations,
        seconds: sol.seconds,
        extraction: None,
        extraction_error: None,
        certificate: None,
    };
    let usable = matches!(sol.status, Status::Optimal | Status::Feasible);
    if let (Some(eo), true, true) = (&opts.extract, !spec.structure.uses_cliques(), usable) {
        match extract_and_certify(
            problem,
            &prepared.relaxation,
            &prepared.map,
            &sol.x,
            bound,
            spec.r,
            eo,
            opts.cert_tol,
        ) {
            Ok((rep, cert)) => {
                out.extraction = Some(rep);
                out.certificate = Some(cert);
            }
            Err(e) => out.extraction_error = Some(e.to_string()),
        }
    }
    out
}

/// Build, realize and solve; on an optimal dense solve also extract and certify.
pub fn solve_relaxation(
    problem: &AnyPop,
    spec: &RelaxationSpec,
    opts: &PipelineOptions,
) -> Result<SolveReport> {
    let prepared = prepare(problem, spec)?;
    let sol = solve(&prepared.lmi, &opts.solver)?;
    Ok(report(problem, spec, &prepared, &sol, opts))
}
