//! Moment indices, symbolic moment/localizing/shift blocks and the dense
//! relaxation assemblers.

mod builders;
mod index;
mod lincomb;
mod matrix;
mod relaxation;

pub use builders::{
    complex_localizing_block, complex_localizing_matrix, complex_moment_block,
    complex_moment_matrix, complex_shift_block, complex_shift_block_on, real_localizing_block,
    real_localizing_matrix, real_moment_block, real_moment_matrix, real_shift_block,
    real_shift_block_on,
};
pub use index::{Coeff, ComplexMomentIndex, MomentKey, RealMomentIndex};
pub use lincomb::LinComb;
pub use matrix::{BlockRole, BlockTag, SymbolicMatrix, SymmetryKind};
pub use relaxation::{
    assemble_las_complex, assemble_las_real, assemble_slas_complex, assemble_slas_real,
    real_catalog_degree, ComplexRelaxation, Equality, Method, MomentField, RealRelaxation,
    Relaxation, RelaxationBuilder, RelaxationMeta,
};
pub(crate) use relaxation::{add_constraints, check_order};
