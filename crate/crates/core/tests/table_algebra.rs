mod common;

use common::*;
use markex::oracle::universe;
use markex::{
    apply_unary, attrs, concat_tables, join_tables, set_op_tables, AttrSet, GammaTable, JoinKind,
    SetOp, UnaryOp,
};
use proptest::prelude::*;

/// A random table over `gamma` for documents of length `len`.
fn table_strategy(gamma: &'static [&'static str], len: usize) -> impl Strategy<Value = GammaTable> {
    let g: AttrSet = attrs(gamma.iter());
    let all: Vec<_> = universe(len, &g).unwrap().collect();
    let n = all.len();
    proptest::collection::vec(any::<bool>(), n).prop_map(move |keep| {
        GammaTable::from_rows(
            g.clone(),
            len,
            all.iter()
                .zip(keep)
                .filter(|(_, k)| *k)
                .map(|(t, _)| t.clone()),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn commutative_joins(a in table_strategy(&["x", "y"], 2), b in table_strategy(&["x", "z"], 2)) {
        for k in [JoinKind::Natural, JoinKind::Union, JoinKind::Intersection] {
            prop_assert_eq!(join_tables(&a, &b, k).unwrap(), join_tables(&b, &a, k).unwrap());
        }
    }

    #[test]
    fn natural_join_is_contained_in_union_join(a in table_strategy(&["x", "y"], 2), b in table_strategy(&["x", "z"], 2)) {
        let n = join_tables(&a, &b, JoinKind::Natural).unwrap();
        let u = join_tables(&a, &b, JoinKind::Union).unwrap();
        prop_assert!(n.rows().all(|r| u.contains(r)));
    }

    #[test]
    fn set_operations_follow_membership(a in table_strategy(&["x"], 3), b in table_strategy(&["x"], 3)) {
        for op in [SetOp::Union, SetOp::Intersection, SetOp::Difference] {
            let c = set_op_tables(&a, &b, op).unwrap();
            for t in universe(3, a.gamma()).unwrap() {
                prop_assert_eq!(c.contains(&t), op.on_bools(a.contains(&t), b.contains(&t)));
            }
        }
    }

    #[test]
    fn concatenation_is_associative(
        a in table_strategy(&["x"], 1),
        b in table_strategy(&["y"], 2),
        c in table_strategy(&["x", "y"], 1),
    ) {
        prop_assert_eq!(
            concat_tables(&concat_tables(&a, &b), &c),
            concat_tables(&a, &concat_tables(&b, &c))
        );
    }

    #[test]
    fn rename_round_trips(a in table_strategy(&["x", "y"], 2)) {
        let there = apply_unary(&a, &UnaryOp::rename("x", "z")).unwrap();
        let back = apply_unary(&there, &UnaryOp::rename("z", "x")).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn projection_never_adds_rows(a in table_strategy(&["x", "y"], 2)) {
        let p = apply_unary(&a, &UnaryOp::project(&["x"])).unwrap();
        prop_assert!(p.len() <= a.len());
        prop_assert_eq!(p.gamma(), &attrs(["x"]));
    }
}

#[test]
fn union_pads_both_sides() {
    let a = table(&["x"], 2, &[&[&[1]]]);
    let b = table(&["y"], 2, &[&[&[2]]]);
    let u = set_op_tables(&a, &b, SetOp::Union).unwrap();
    assert_eq!(u.gamma(), &attrs(["x", "y"]));
    assert!(u.contains(&tuple(2, &[("x", &[1]), ("y", &[])])));
    assert!(u.contains(&tuple(2, &[("x", &[]), ("y", &[2])])));
}

#[test]
fn merge_combines_columns() {
    let a = table(&["x", "y"], 3, &[&[&[1, 2], &[2, 3]]]);
    let cases = [
        (SetOp::Union, &[1usize, 2, 3][..]),
        (SetOp::Intersection, &[2]),
        (SetOp::Difference, &[1]),
    ];
    for (op, want) in cases {
        let m = apply_unary(&a, &UnaryOp::merge("x", "y", op)).unwrap();
        assert_eq!(m, table(&["x"], 3, &[&[want]]));
    }
}

#[test]
fn tables_of_different_lengths_do_not_mix() {
    let a = table(&["x"], 2, &[]);
    let b = table(&["x"], 3, &[]);
    assert!(set_op_tables(&a, &b, SetOp::Union).is_err());
    assert_eq!(concat_tables(&a, &b).doc_len(), 5);
}
