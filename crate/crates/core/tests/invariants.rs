mod oracle;

use oracle::{strs, Table};
use proptest::prelude::*;
use relcausal::gaxioms::{closure, empirical_ci_set, CiSet, ClosureBounds, Mode};
use relcausal::joinprop::{infer_join_cis, InferOptions, JoinSpec, KeyClass};
use relcausal::relcore::{empirical_ci, natural_join, probability, Assignment, AttrSet, Relation};
use relcausal::rational::Rational;
use relcausal::ugm::UndirectedGraph;

fn relation(name: &str, cols: &[&str], rows: &[(Vec<u8>, u64)]) -> Relation {
    let mut r = Relation::new(name, cols.iter().copied()).unwrap();
    for (vals, m) in rows {
        let vals = vals.iter().map(|v| format!("v{v}").into()).collect();
        r.push_weighted(vals, *m).unwrap();
    }
    r
}

fn rows(width: usize) -> impl Strategy<Value = Vec<(Vec<u8>, u64)>> {
    prop::collection::vec((prop::collection::vec(0u8..3, width), 1u64..4), 1..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn join_size_is_sum_of_products(r in rows(3), s in rows(2)) {
        let r = relation("R", &["A", "B", "C"], &r);
        let s = relation("S", &["C", "D"], &s);
        let j = natural_join(&r, &s);
        prop_assert_eq!(j.len(), Table::of(&r).join(&Table::of(&s)).total());
        prop_assert_eq!(j.schema(), AttrSet::parse_list("A,B,C,D"));
    }

    #[test]
    fn ci_is_symmetric_and_matches_oracle(r in rows(4)) {
        let r = relation("R", &["A", "B", "C", "D"], &r);
        let t = Table::of(&r);
        for (x, y, z) in [("A", "B", "C"), ("A", "B", ""), ("A", "C,D", "B"), ("A,B", "D", "C")] {
            let (xs, ys, zs) = (AttrSet::parse_list(x), AttrSet::parse_list(y), AttrSet::parse_list(z));
            let lib = empirical_ci(&r, &xs, &ys, &zs).unwrap();
            prop_assert_eq!(lib, empirical_ci(&r, &ys, &xs, &zs).unwrap());
            prop_assert_eq!(lib, t.ci(&strs(x), &strs(y), &strs(z)));
        }
    }

    #[test]
    fn conditional_probabilities_sum_to_one(r in rows(3)) {
        let r = relation("R", &["A", "B", "C"], &r);
        let given = Assignment::new().with("C", "v0");
        if probability(&r, &Assignment::new(), &given).is_ok() {
            let total = (0..3).fold(Rational::from_integer(0.into()), |acc, v| {
                acc + probability(&r, &Assignment::new().with("A", &format!("v{v}")), &given).unwrap()
            });
            prop_assert_eq!(total, Rational::from_integer(1.into()));
        }
    }

    #[test]
    fn closure_is_idempotent_and_sound(r in rows(4)) {
        let r = relation("R", &["A", "B", "C", "D"], &r);
        let truth = empirical_ci_set(&r, 12).unwrap();
        let once = closure(&truth, Mode::Semigraphoid, &ClosureBounds::default()).unwrap();
        let twice = closure(&once, Mode::Semigraphoid, &ClosureBounds::default()).unwrap();
        prop_assert_eq!(once.len(), twice.len());
        prop_assert_eq!(once.len(), truth.len());
    }

    #[test]
    fn base_join_ci_always_holds(r in rows(3), s in rows(3)) {
        let r = relation("R", &["A", "B", "C"], &r);
        let s = relation("S", &["C", "D", "E"], &s);
        let spec = JoinSpec::between(&r, &s, KeyClass::General).unwrap();
        let schemas = [("R".to_owned(), r.schema()), ("S".to_owned(), s.schema())].into_iter().collect();
        let inf = infer_join_cis(&schemas, &CiSet::new(AttrSet::parse_list("A,B,C,D,E")), &[spec], &InferOptions::default()).unwrap();
        let j = natural_join(&r, &s);
        for st in inf.statements() {
            prop_assert!(empirical_ci(&j, st.x(), st.y(), st.z()).unwrap(), "{} fails", st);
        }
        prop_assert!(empirical_ci(&j, &AttrSet::parse_list("A,B"), &AttrSet::parse_list("D,E"), &AttrSet::parse_list("C")).unwrap());
    }

    #[test]
    fn separation_is_monotone_in_the_separator(edges in prop::collection::vec((0usize..5, 0usize..5), 0..8)) {
        let names = ["A", "B", "C", "D", "E"];
        let edges: Vec<(&str, &str)> = edges.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (names[a], names[b])).collect();
        let g = UndirectedGraph::from_edges(&names, &edges).unwrap();
        let (x, y) = (AttrSet::parse_list("A"), AttrSet::parse_list("B"));
        if g.separated(&x, &y, &AttrSet::parse_list("C")).unwrap() {
            // adding a vertex to the separator never opens a path
            prop_assert!(g.separated(&x, &y, &AttrSet::parse_list("C,D")).unwrap());
        }
        prop_assert!(g.separated(&x, &y, &AttrSet::parse_list("C,D,E")).unwrap() || g.has_edge(&"A".into(), &"B".into()));
    }
}
