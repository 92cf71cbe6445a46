//! Sparse real and complex polynomials, graded-lex monomial bases and the
//! problem file format.

mod complex;
mod degrees;
mod exponent;
mod problem;
mod real;

pub use complex::ComplexPoly;
pub use degrees::{half_degrees_complex, half_degrees_real, HalfDegrees};
pub use exponent::{binomial, monomial_basis, monomial_basis_in, Exponent};
pub use problem::{
    AnyPop, ComplexPop, Constraint, ConstraintKind, Polynomial, Pop, ProblemFile, RealPop, Sense,
};
pub use real::RealPoly;

#[cfg(test)]
mod proptests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn real_poly(n: usize) -> impl Strategy<Value = RealPoly> {
        prop::collection::vec((prop::collection::vec(0u32..3, n), -2.0f64..2.0), 0..6).prop_map(
            move |terms| {
                RealPoly::from_terms(n, terms.into_iter().map(|(e, c)| (Exponent::new(e), c)))
                    .unwrap()
            },
        )
    }

    fn complex_poly(n: usize) -> impl Strategy<Value = ComplexPoly> {
        prop::collection::vec(
            (
                prop::collection::vec(0u32..3, n),
                prop::collection::vec(0u32..3, n),
                -2.0f64..2.0,
                -2.0f64..2.0,
            ),
            0..6,
        )
        .prop_map(move |terms| {
            ComplexPoly::from_terms(
                n,
                terms.into_iter().map(|(b, g, re, im)| {
                    (Exponent::new(b), Exponent::new(g), Complex64::new(re, im))
                }),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn real_product_evaluates_multiplicatively(
            p in real_poly(3), q in real_poly(3),
            w in prop::collection::vec(-1.5f64..1.5, 3)
        ) {
            let lhs = (&p * &q).eval(&w).unwrap();
            let rhs = p.eval(&w).unwrap() * q.eval(&w).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs().max(rhs.abs())));
        }

        #[test]
        fn complex_product_evaluates_multiplicatively(
            p in complex_poly(2), q in complex_poly(2),
            w in prop::collection::vec((-1.5f64..1.5, -1.5f64..1.5), 2)
        ) {
            let w: Vec<Complex64> = w.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            let lhs = (&p * &q).eval(&w).unwrap();
            let rhs = p.eval(&w).unwrap() * q.eval(&w).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm().max(rhs.norm())));
        }

        #[test]
        fn symmetrized_is_self_conjugate(p in complex_poly(3)) {
            prop_assert!((&p + &p.conjugate()).is_self_conjugate());
            prop_assert_eq!(p.conjugate().conjugate(), p);
        }

        #[test]
        fn basis_is_exactly_the_graded_set(n in 1usize..4, r in 0usize..5) {
            let basis = monomial_basis(n, r);
            prop_assert_eq!(basis.len(), binomial(n + r, r));
            let set: std::collections::BTreeSet<_> = basis.iter().cloned().collect();
            prop_assert_eq!(set.len(), basis.len());
            prop_assert!(basis.iter().all(|a| a.degree() as usize <= r && a.n() == n));
        }
    }
}
