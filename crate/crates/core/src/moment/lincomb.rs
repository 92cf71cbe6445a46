use std::collections::BTreeMap;

use super::{Coeff, MomentKey};

/// Sparse linear combination of moment variables; realizes `L_y` applied to a
/// polynomial. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct LinComb<K: MomentKey> {
    terms: BTreeMap<K, K::Coeff>,
}

impl<K: MomentKey> Default for LinComb<K> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<K: MomentKey> LinComb<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(key: K, c: K::Coeff) -> Self {
        let mut l = Self::new();
        l.add_term(key, c);
        l
    }

    pub fn add_term(&mut self, key: K, c: K::Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = *o.get() + c;
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&K, K::Coeff)> {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn coeff(&self, key: &K) -> K::Coeff {
        self.terms.get(key).copied().unwrap_or_default()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Conjugate combination: conjugated coefficients on conjugated keys.
    pub fn conjugate(&self) -> Self {
        let mut l = Self::new();
        for (k, c) in self.terms() {
            l.add_term(k.conjugate(), c.conj());
        }
        l
    }

    /// Evaluates the combination against a numeric moment assignment given per
    /// (oriented) key.
    pub fn eval(&self, moment: impl Fn(&K) -> K::Coeff) -> K::Coeff {
        self.terms()
            .fold(K::Coeff::default(), |acc, (k, c)| acc + c * moment(k))
    }

    /// Exact fingerprint for deduplication.
    pub(crate) fn fingerprint(&self) -> Vec<(K, (u64, u64))> {
        self.terms().map(|(k, c)| (k.clone(), c.bits())).collect()
    }
}
