use proptest::prelude::*;
use shiftsdp::sdp::{export_sdpa, import_sdpa, parse_sdpa, to_sdpa_string, BlockKind, LinearEquality, LmiBlock, LmiProblem};

fn coeff() -> impl Strategy<Value = f64> {
    prop_oneof![(-1e3f64..1e3), Just(1.0), Just(-0.5), (1e-12f64..1e-6)]
}

fn block(m: usize) -> impl Strategy<Value = LmiBlock> {
    (1usize..5, any::<bool>()).prop_flat_map(move |(dim, diag)| {
        let entry = (0..=m, 0..dim, 0..dim, coeff());
        proptest::collection::vec(entry, 1..12).prop_map(move |entries| {
            let kind = if diag { BlockKind::Diagonal } else { BlockKind::Dense };
            let mut b = LmiBlock::new(dim, kind, "b");
            for (k, i, j, v) in entries {
                let j = if diag { i } else { j };
                b.add(if k == m { None } else { Some(k) }, i, j, v);
            }
            b
        })
    })
}

fn problem() -> impl Strategy<Value = LmiProblem> {
    (1usize..5).prop_flat_map(|m| {
        let eq = (proptest::collection::vec((0..m, coeff()), 1..3), coeff())
            .prop_map(|(coeffs, rhs)| LinearEquality { coeffs, rhs });
        (
            proptest::collection::vec(coeff(), m),
            proptest::collection::vec(block(m), 1..4),
            proptest::collection::vec(eq, 0..3),
        )
            .prop_map(move |(b, blocks, equalities)| {
                let mut p = LmiProblem::new(b);
                p.blocks = blocks;
                p.equalities = equalities;
                p
            })
    })
}

proptest! {
    #[test]
    fn string_round_trip(p in problem()) {
        let text = to_sdpa_string(&p);
        let q = parse_sdpa(&text).unwrap();
        prop_assert_eq!(q.m, p.m);
        prop_assert_eq!(&q.b, &p.b);
        prop_assert_eq!(q.block_sizes(), p.block_sizes());
        // a second pass is a fixed point
        prop_assert_eq!(to_sdpa_string(&q), text);
        let x: Vec<f64> = (0..p.m).map(|k| 0.25 * k as f64 - 0.3).collect();
        for (a, b) in p.blocks.iter().zip(&q.blocks) {
            prop_assert_eq!(a.instantiate(&x), b.instantiate(&x));
        }
    }
}

#[test]
fn file_round_trip() {
    let mut b = LmiBlock::new(2, BlockKind::Dense, "t");
    b.add(None, 0, 1, 1.0);
    b.add(Some(0), 0, 0, 1.0);
    b.add(Some(0), 1, 1, 1.0);
    let mut p = LmiProblem::new(vec![1.0]);
    p.blocks.push(b);
    p.equalities.push(LinearEquality { coeffs: vec![(0, 2.0)], rhs: 3.0 });
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.dat-s");
    export_sdpa(&p, &path).unwrap();
    let q = import_sdpa(&path).unwrap();
    assert!(q.structurally_equal(&p));
}
