mod common;

use common::*;
use std::collections::BTreeSet;

use markex::oracle::{expected_table, oracle_eval, OracleExtractor};
use markex::{
    Alphabets, Extractor, ExtractorGrammar, Limits, Marker, MarkerString, Operator, SetOp, Symbol,
};
use proptest::prelude::*;

/// Every marker string over `markers` of length at most `max`.
fn marker_strings(markers: &[Marker], max: usize) -> Vec<MarkerString> {
    let mut out = vec![MarkerString::default()];
    let mut layer = vec![Vec::<Marker>::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &layer {
            for m in markers {
                let mut t = s.clone();
                t.push(m.clone());
                next.push(t);
            }
        }
        out.extend(next.iter().cloned().map(MarkerString::new));
        layer = next;
    }
    out
}

/// The strings of length at most `max` derivable from each nonterminal,
/// computed as a least fixpoint over the rules.
fn derivable(g: &ExtractorGrammar, max: usize) -> Vec<BTreeSet<Vec<Marker>>> {
    let mut d: Vec<BTreeSet<Vec<Marker>>> = vec![BTreeSet::new(); g.names().len()];
    loop {
        let mut changed = false;
        for rule in g.rules() {
            let mut forms: BTreeSet<Vec<Marker>> = [Vec::new()].into();
            for sym in &rule.body {
                let parts: Vec<Vec<Marker>> = match sym {
                    Symbol::Terminal(m) => vec![vec![m.clone()]],
                    Symbol::Nonterminal(n) => d[*n].iter().cloned().collect(),
                };
                forms = forms
                    .iter()
                    .flat_map(|f| {
                        parts
                            .iter()
                            .filter(move |p| f.len() + p.len() <= max)
                            .map(move |p| [f.clone(), p.clone()].concat())
                    })
                    .collect();
            }
            for f in forms {
                changed |= d[rule.head].insert(f);
            }
        }
        if !changed {
            return d;
        }
    }
}

fn random_cf(seed: u64) -> ExtractorGrammar {
    let mut r = rng(seed);
    let g = random_gamma(&mut r);
    random_grammar(&mut r, &g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_matches_the_oracle(seed in any::<u64>()) {
        let e: Extractor = random_cf(seed).into();
        for w in documents(SIGMA, 3) {
            let oracle = oracle_eval(&OracleExtractor::from(&e), &w).unwrap();
            prop_assert_eq!(e.evaluate(&w, &Limits::default()).unwrap(), oracle);
        }
    }

    #[test]
    fn intersection_with_an_automaton_matches_tables(seed in any::<u64>()) {
        let l = Limits::default();
        let mut r = rng(seed);
        let gamma = random_gamma(&mut r);
        let g = random_grammar(&mut r, &gamma);
        let m = random_automaton(&mut r, &gamma);
        let both: Extractor = g.intersect_automaton(&m).into();
        let (g, m): (Extractor, Extractor) = (g.into(), m.into());
        for w in documents(SIGMA, 3) {
            let want = markex::set_op_tables(
                &g.evaluate(&w, &l).unwrap(),
                &m.evaluate(&w, &l).unwrap(),
                SetOp::Intersection,
            )
            .unwrap();
            prop_assert_eq!(both.evaluate(&w, &l).unwrap(), want);
        }
    }

    #[test]
    fn cyk_agrees_with_derivation(seed in any::<u64>()) {
        let g = random_cf(seed);
        let lang = &derivable(&g, 4)[g.start()];
        let markers = g.alphabets().all_markers();
        let max = if markers.len() > 4 { 3 } else { 4 };
        for s in marker_strings(&markers, max) {
            prop_assert_eq!(g.accepts(&s), lang.contains(s.markers()), "{}", s);
        }
    }

    #[test]
    fn erasure_and_intersection_act_on_strings(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gamma = random_gamma(&mut r);
        let g = random_grammar(&mut r, &gamma);
        let m = random_automaton(&mut r, &gamma);
        let both = g.intersect_automaton(&m);
        let erased = g.erase_to_sign();
        let markers = g.alphabets().all_markers();
        let mut images = BTreeSet::new();
        for s in marker_strings(&markers, 3) {
            prop_assert_eq!(both.accepts(&s), g.accepts(&s) && m.accepts(&s));
            if g.accepts(&s) {
                images.insert(s.markers().iter().map(|x| Marker::bare(x.sign)).collect::<Vec<_>>());
            }
        }
        let bare: Vec<Marker> = "ab".chars().map(Marker::bare).collect();
        for u in marker_strings(&bare, 3) {
            prop_assert_eq!(erased.accepts(&u), images.contains(u.markers()));
        }
    }

    #[test]
    fn limited_slices_are_prefixes(seed in any::<u64>(), k in 0usize..6) {
        let e: Extractor = random_cf(seed).into();
        let l = Limits::default();
        for w in documents(SIGMA, 3) {
            let all = e.slice_strings(&w, None, &l).unwrap();
            let some = e.slice_strings(&w, Some(k), &l).unwrap();
            prop_assert_eq!(&all[..k.min(all.len())], &some[..]);
        }
    }

    #[test]
    fn grammar_text_round_trips(seed in any::<u64>()) {
        let g = random_cf(seed);
        let back: ExtractorGrammar = g.to_string().parse().unwrap();
        let (a, b): (Extractor, Extractor) = (g.into(), back.into());
        for w in documents(SIGMA, 2) {
            let l = Limits::default();
            prop_assert_eq!(a.evaluate(&w, &l).unwrap(), b.evaluate(&w, &l).unwrap());
        }
    }

    #[test]
    fn automata_convert_to_equivalent_grammars(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gamma = random_gamma(&mut r);
        let a = random_automaton(&mut r, &gamma);
        let g: Extractor = a.to_grammar().into();
        let m: Extractor = a.into();
        for w in documents(SIGMA, 3) {
            let l = Limits::default();
            prop_assert_eq!(m.evaluate(&w, &l).unwrap(), g.evaluate(&w, &l).unwrap());
        }
    }
}

fn nested() -> ExtractorGrammar {
    "grammar
sigma: a b
gamma: x
S -> {x}:a S {}:b | {}:a S {x}:b | <eps>
"
    .parse()
    .unwrap()
}

#[test]
fn balanced_grammar_tables() {
    let l = Limits::default();
    let e: Extractor = nested().into();
    assert_eq!(e.evaluate("", &l).unwrap().len(), 1);
    assert!(e.evaluate("ab", &l).unwrap().len() == 2);
    assert_eq!(e.evaluate("aabb", &l).unwrap().len(), 4);
    assert!(e.evaluate("abab", &l).unwrap().is_empty());
    assert!(e.evaluate("aab", &l).unwrap().is_empty());
}

#[test]
fn star_and_concat_stay_context_free() {
    let l = Limits::default();
    let e: Extractor = nested().into();
    let s = e.star().unwrap();
    assert!(!s.is_regular());
    assert_eq!(s.evaluate("abab", &l).unwrap().len(), 4);
    let c = e.concat(&e).unwrap();
    assert_eq!(c.evaluate("abab", &l).unwrap().len(), 4);
}

#[test]
fn operations_outside_the_class_are_refused() {
    let l = Limits::default();
    let e: Extractor = nested().into();
    assert!(e.complement(&l).is_err());
    assert!(e.set_op(&e, SetOp::Intersection, &l).is_err());
}

#[test]
fn malformed_grammars_are_parse_errors() {
    for bad in [
        "S -> {x}:a |",
        "S -> <eps> {}:a",
        "start: T\nS -> {}:a",
        "S -> {x:a",
    ] {
        assert!(bad.parse::<ExtractorGrammar>().is_err(), "{bad}");
    }
}

#[test]
fn long_documents_use_polynomial_work() {
    let e: Extractor = nested().into();
    let w = format!("{}{}", "a".repeat(40), "b".repeat(40));
    let l = Limits::default();
    let ans = markex::table_empty(&e, &w).unwrap();
    assert!(!ans.verdict);
    let rows = e.evaluate_limited(&w, Some(10), &l).unwrap();
    assert_eq!(rows.len(), 10);
}

fn counting(first: &str, second: &str, third: &str) -> ExtractorGrammar {
    format!("grammar\nsigma: a b c\nS -> {first}\n{second}\n{third}\n")
        .parse()
        .unwrap()
}

#[test]
fn intersections_of_grammars_are_computed_per_document() {
    let l = Limits::default();
    // a^n b^n c^m and a^m b^n c^n; their intersection a^n b^n c^n is not
    // context-free.
    let g1: Extractor = counting("X C", "X -> {}:a X {}:b | <eps>", "C -> {}:c C | <eps>").into();
    let g2: Extractor = counting("A Y", "A -> {}:a A | <eps>", "Y -> {}:b Y {}:c | <eps>").into();
    let op = Operator::Set(SetOp::Intersection);
    assert!(op.apply(&[&g1, &g2], &l).is_err());
    assert!(!op.is_closed_for(&[&g1, &g2]));
    let (c1, c2) = (g1.clone(), g2.clone());
    let both = OracleExtractor::new(Alphabets::of("abc", &[]), move |s: &MarkerString| {
        c1.accepts(s) && c2.accepts(s)
    });
    let mut docs: BTreeSet<String> = documents("abc", 5).into_iter().collect();
    for i in 0..=9 {
        for j in 0..=9 - i {
            for k in 0..=9 - i - j {
                docs.insert(format!(
                    "{}{}{}",
                    "a".repeat(i),
                    "b".repeat(j),
                    "c".repeat(k)
                ));
            }
        }
    }
    let mut hits = 0;
    for w in &docs {
        let got = op.evaluate(&[&g1, &g2], w, &l).unwrap();
        assert_eq!(got, oracle_eval(&both, w).unwrap(), "{w}");
        hits += usize::from(!got.is_empty());
    }
    assert_eq!(hits, 4);
}

#[test]
fn complements_and_joins_of_grammars_are_computed_per_document() {
    let l = Limits::default();
    let g: Extractor = nested().into();
    let m = Extractor::parse("sigma: a b\ngamma: y\n({y}:a | {}:b)*", &l).unwrap();
    for w in documents(SIGMA, 3) {
        let ops = [
            (Operator::Complement, vec![&g]),
            (Operator::Join(markex::JoinKind::Natural), vec![&g, &m]),
            (Operator::Set(SetOp::Difference), vec![&m, &g]),
            (Operator::Set(SetOp::Intersection), vec![&g, &g]),
        ];
        for (op, args) in ops {
            assert_eq!(
                op.evaluate(&args, &w, &l).unwrap(),
                expected_table(&op, &args, &w).unwrap(),
                "{op} on {w:?}"
            );
        }
    }
    let tight = Limits { max_rows: 8, ..l };
    assert!(Operator::Complement
        .evaluate(&[&g], "abab", &tight)
        .unwrap_err()
        .is_resource());
}
