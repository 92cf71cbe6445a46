//! Correlative sparsity (clique decompositions) and sign symmetry (block
//! partitioning of moment bases).

mod cliques;
mod cs;
mod sign;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cliques::{decompose, detect_cliques, validate_cliques, CliqueDecomposition};
pub use cs::{assemble_cs_complex, assemble_cs_real, CsShift};
pub use sign::{
    apply_sign_symmetry, assemble_ss_complex, assemble_ss_real, partition_labels,
    partition_matrix, sign_symmetries, SignSymmetryGroup,
};

/// Structure exploited when assembling a relaxation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StructureMode {
    #[default]
    #[serde(rename = "dense")]
    Dense,
    #[serde(rename = "cs")]
    Cs,
    #[serde(rename = "sign")]
    Sign,
    #[serde(rename = "cs+sign")]
    CsSign,
}

impl StructureMode {
    pub fn uses_cliques(self) -> bool {
        matches!(self, StructureMode::Cs | StructureMode::CsSign)
    }

    pub fn uses_sign(self) -> bool {
        matches!(self, StructureMode::Sign | StructureMode::CsSign)
    }

    fn name(self) -> &'static str {
        match self {
            StructureMode::Dense => "dense",
            StructureMode::Cs => "cs",
            StructureMode::Sign => "sign",
            StructureMode::CsSign => "cs+sign",
        }
    }
}

impl fmt::Display for StructureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StructureMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dense" => Ok(StructureMode::Dense),
            "cs" => Ok(StructureMode::Cs),
            "sign" => Ok(StructureMode::Sign),
            "cs+sign" | "sign+cs" => Ok(StructureMode::CsSign),
            other => Err(format!(
                "unknown structure mode {other:?}; expected dense, cs, sign or cs+sign"
            )),
        }
    }
}
