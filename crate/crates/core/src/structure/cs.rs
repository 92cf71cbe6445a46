use super::{CliqueDecomposition, StructureMode};
use crate::error::Result;
use crate::moment::{
    add_constraints, check_order, BlockRole, BlockTag, ComplexMomentIndex, Method, MomentField,
    Relaxation, RelaxationBuilder, RelaxationMeta,
};
use crate::poly::{monomial_basis, monomial_basis_in, ComplexPoly, Exponent, Pop, RealPoly};

/// Strengthening used by the correlative-sparse real relaxation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsShift {
    /// Plain sparse relaxation.
    None,
    /// Order-1 shift blocks for every variable over the full variable set.
    Global,
    /// Order-`s` shift blocks for every `i ∈ I_k` over clique `I_k` only.
    CliqueLocal(usize),
}

fn clique_base<P: MomentField>(
    pop: &Pop<P>,
    r: usize,
    cliques: &CliqueDecomposition,
) -> Result<RelaxationBuilder<P::Key>> {
    let hd = P::half_degrees_of(pop)?;
    check_order(r, &hd)?;
    let n = pop.n;
    let mut b = RelaxationBuilder::new(n, pop.min_objective().lincomb());
    for (k, cl) in cliques.cliques.iter().enumerate() {
        let tag = BlockTag::new(BlockRole::Moment { order: r }).in_clique(Some(k));
        b.block(P::gram(None, &monomial_basis_in(n, cl, r), tag));
    }
    add_constraints(&mut b, pop, r, &hd, |idx, order| {
        let k = cliques.assignment[idx];
        (monomial_basis_in(n, &cliques.cliques[k], order), Some(k))
    });
    Ok(b)
}

fn clique_local_shifts<P: MomentField>(
    b: &mut RelaxationBuilder<P::Key>,
    n: usize,
    cliques: &CliqueDecomposition,
    s: usize,
) {
    for (k, cl) in cliques.cliques.iter().enumerate() {
        let basis = monomial_basis_in(n, cl, s);
        for &i in cl {
            let tag = BlockTag::new(BlockRole::Shift { var: i, order: s }).in_clique(Some(k));
            b.block(P::shift(i, &basis, tag));
        }
    }
}

/// Correlative-sparse real relaxation of order `r`.
pub fn assemble_cs_real(
    pop: &Pop<RealPoly>,
    r: usize,
    cliques: &CliqueDecomposition,
    shift: CsShift,
) -> Result<Relaxation<Exponent>> {
    let mut b = clique_base(pop, r, cliques)?;
    let n = pop.n;
    let method = match shift {
        CsShift::None => Method::Las,
        CsShift::Global => {
            let basis = monomial_basis(n, 1);
            for i in 0..n {
                let tag = BlockTag::new(BlockRole::Shift { var: i, order: 1 });
                b.block(<RealPoly as MomentField>::shift(i, &basis, tag));
            }
            Method::Slas { s: 1 }
        }
        CsShift::CliqueLocal(s) => {
            clique_local_shifts::<RealPoly>(&mut b, n, cliques, s);
            Method::Slas { s }
        }
    };
    Ok(b.finish(RelaxationMeta { r, method, structure: StructureMode::Cs }))
}

/// Correlative-sparse complex relaxation of order `r`, with per-clique shift
/// blocks of normal order `s` when given.
pub fn assemble_cs_complex(
    pop: &Pop<ComplexPoly>,
    r: usize,
    s: Option<usize>,
    cliques: &CliqueDecomposition,
) -> Result<Relaxation<ComplexMomentIndex>> {
    let mut b = clique_base(pop, r, cliques)?;
    let method = match s {
        None => Method::Las,
        Some(s) => {
            clique_local_shifts::<ComplexPoly>(&mut b, pop.n, cliques, s);
            Method::Slas { s }
        }
    };
    Ok(b.finish(RelaxationMeta { r, method, structure: StructureMode::Cs }))
}
