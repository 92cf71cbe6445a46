use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::poly::{Polynomial, Pop};

/// Variable cliques `I_1..I_p` (0-based, sorted) and the clique each
/// constraint is assigned to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueDecomposition {
    pub cliques: Vec<Vec<usize>>,
    pub assignment: Vec<usize>,
}

impl CliqueDecomposition {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn max_size(&self) -> usize {
        self.cliques.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Cliques of a greedy minimum-degree chordal extension of the correlative
/// sparsity pattern graph.
pub fn detect_cliques<P: Polynomial>(pop: &Pop<P>) -> CliqueDecomposition {
    let n = pop.n;
    let mut adj = vec![BTreeSet::new(); n];
    let mut connect = |vars: &[usize]| {
        for &a in vars {
            for &b in vars {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    };
    for s in pop.objective.term_supports() {
        connect(&s);
    }
    for c in &pop.constraints {
        connect(&c.poly.variables());
    }

    let mut alive = vec![true; n];
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (adj[v].len(), v))
            .expect("a vertex remains");
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &nbrs {
            for &b in &nbrs {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        for &a in &nbrs {
            adj[a].remove(&v);
        }
        let mut clique = nbrs;
        clique.push(v);
        clique.sort_unstable();
        candidates.push(clique);
        alive[v] = false;
    }

    let mut cliques: Vec<Vec<usize>> = Vec::new();
    for (k, c) in candidates.iter().enumerate() {
        let dominated = candidates.iter().enumerate().any(|(l, d)| {
            l != k && d.len() >= c.len() && is_subset(c, d) && (d.len() > c.len() || l < k)
        });
        if !dominated {
            cliques.push(c.clone());
        }
    }
    cliques.sort();
    let assignment = assign(pop, &cliques).expect("detected cliques cover every constraint");
    CliqueDecomposition { cliques, assignment }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

fn assign<P: Polynomial>(pop: &Pop<P>, cliques: &[Vec<usize>]) -> Result<Vec<usize>> {
    pop.constraints
        .iter()
        .enumerate()
        .map(|(index, c)| {
            let support = c.poly.variables();
            cliques
                .iter()
                .position(|cl| is_subset(&support, cl))
                .ok_or(Error::InvalidCliques { index, support })
        })
        .collect()
}

/// Validates user-supplied cliques against the problem's supports.
pub fn validate_cliques<P: Polynomial>(
    pop: &Pop<P>,
    cliques: &[Vec<usize>],
) -> Result<CliqueDecomposition> {
    let mut cliques: Vec<Vec<usize>> = cliques
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c.dedup();
            c
        })
        .collect();
    for c in &cliques {
        if let Some(&bad) = c.iter().find(|&&i| i >= pop.n) {
            return Err(Error::InvalidParameter(format!(
                "clique index {bad} out of range for n = {}",
                pop.n
            )));
        }
    }
    for s in pop.objective.term_supports() {
        if !cliques.iter().any(|cl| is_subset(&s, cl)) {
            return Err(Error::InvalidParameter(format!(
                "objective term with support {s:?} is not contained in any clique"
            )));
        }
    }
    cliques.retain(|c| !c.is_empty());
    let assignment = assign(pop, &cliques)?;
    Ok(CliqueDecomposition { cliques, assignment })
}

/// User cliques when given, detected cliques otherwise.
pub fn decompose<P: Polynomial>(
    pop: &Pop<P>,
    user: Option<&[Vec<usize>]>,
) -> Result<CliqueDecomposition> {
    match user {
        Some(c) => validate_cliques(pop, c),
        None => Ok(detect_cliques(pop)),
    }
}
