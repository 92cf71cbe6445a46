use super::{ComplexPoly, RealPoly};
use crate::error::Result;

/// Half-degrees of the constraints and the minimal admissible relaxation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfDegrees {
    pub d_min: usize,
    pub constraints: Vec<usize>,
}

/// Real case: `d_i = ⌈deg g_i / 2⌉`, `d_min = max(⌈deg f / 2⌉, d_i)`.
pub fn half_degrees_real(f: &RealPoly, gs: &[&RealPoly]) -> HalfDegrees {
    let half = |p: &RealPoly| (p.degree() as usize).div_ceil(2);
    let constraints: Vec<usize> = gs.iter().map(|g| half(g)).collect();
    let d_min = constraints.iter().copied().fold(half(f), usize::max);
    HalfDegrees { d_min, constraints }
}

/// Complex case: `d_i = max{|β|, |γ|}` over the support; every input must be
/// self-conjugate.
pub fn half_degrees_complex(f: &ComplexPoly, gs: &[&ComplexPoly]) -> Result<HalfDegrees> {
    f.check_self_conjugate()?;
    for g in gs {
        g.check_self_conjugate()?;
    }
    let constraints: Vec<usize> = gs.iter().map(|g| g.half_degree() as usize).collect();
    let d_min = constraints
        .iter()
        .copied()
        .fold(f.half_degree() as usize, usize::max);
    Ok(HalfDegrees { d_min, constraints })
}
