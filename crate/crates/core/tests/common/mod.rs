#![allow(dead_code)]

use std::path::PathBuf;

use markex::{
    attrs, Alphabets, AutomatonBuilder, Extractor, ExtractorAutomaton, ExtractorGrammar,
    GammaTable, GammaTuple, Limits, Marker, Symbol,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn load(name: &str) -> Extractor {
    Extractor::parse(&fixture(name), &Limits::default()).unwrap()
}

pub const EXAMPLE_DOC: &str = "baaabacadcb";

pub fn tuple(len: usize, entries: &[(&str, &[usize])]) -> GammaTuple {
    GammaTuple::from_entries(len, entries).unwrap()
}

/// A table with one column per name; each row lists the entries in column
/// order.
pub fn table(names: &[&str], len: usize, rows: &[&[&[usize]]]) -> GammaTable {
    GammaTable::from_rows(
        attrs(names.iter()),
        len,
        rows.iter().map(|r| {
            let e: Vec<(&str, &[usize])> = names.iter().copied().zip(r.iter().copied()).collect();
            tuple(len, &e)
        }),
    )
    .unwrap()
}

pub fn example_e1_table() -> GammaTable {
    let x: &[usize] = &[2, 8];
    let y: &[usize] = &[2, 3];
    table(
        &["x", "y", "z"],
        11,
        &[
            &[x, y, &[7, 9, 10]],
            &[x, y, &[9, 10]],
            &[x, y, &[7, 10]],
            &[x, y, &[7, 9]],
            &[x, y, &[10]],
            &[x, y, &[9]],
            &[x, y, &[7]],
            &[x, y, &[]],
        ],
    )
}

pub fn example_e2_table() -> GammaTable {
    let mut rows: Vec<[&[usize]; 2]> = Vec::new();
    for b in [&[7usize, 10][..], &[7], &[10], &[]] {
        for a in [&[1usize, 7][..], &[1, 10], &[5, 7], &[5, 10]] {
            rows.push([a, b]);
        }
    }
    let rows: Vec<&[&[usize]]> = rows.iter().map(|r| &r[..]).collect();
    table(&["A", "B"], 11, &rows)
}

/// Every document over `sigma` of length at most `max`.
pub fn documents(sigma: &str, max: usize) -> Vec<String> {
    let letters: Vec<char> = sigma.chars().collect();
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &layer {
            for &c in &letters {
                next.push(format!("{w}{c}"));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub const SIGMA: &str = "ab";

/// A random attribute set of size at most 2 drawn from {x, y}.
pub fn random_gamma(r: &mut impl Rng) -> Vec<&'static str> {
    match r.gen_range(0..5) {
        0 => vec![],
        1 => vec!["x"],
        2 => vec!["y"],
        _ => vec!["x", "y"],
    }
}

pub fn context(gamma: &[&str]) -> Alphabets {
    Alphabets::of(SIGMA, gamma)
}

/// A random ε-free automaton with at most 4 states.
pub fn random_automaton(r: &mut impl Rng, gamma: &[&str]) -> ExtractorAutomaton {
    let ctx = context(gamma);
    let markers = ctx.all_markers();
    let n = r.gen_range(1..=4);
    let density = r.gen_range(0.08..0.3);
    let mut b = AutomatonBuilder::new(ctx);
    b.add_states(n);
    for p in 0..n {
        for m in &markers {
            for q in 0..n {
                if r.gen_bool(density) {
                    b.add_transition(p, m.clone(), q).unwrap();
                }
            }
        }
        if r.gen_bool(0.4) {
            b.set_final(p).unwrap();
        }
    }
    b.build().unwrap()
}

/// A random grammar with at most 6 rules over nonterminals S, A, B.
pub fn random_grammar(r: &mut impl Rng, gamma: &[&str]) -> ExtractorGrammar {
    let ctx = context(gamma);
    let markers = ctx.all_markers();
    let mut b = ExtractorGrammar::builder(ctx);
    let ids = [b.nonterminal("S"), b.nonterminal("A"), b.nonterminal("B")];
    let rules = r.gen_range(1..=6);
    for k in 0..rules {
        let head = if k == 0 {
            ids[0]
        } else {
            *ids.choose(r).unwrap()
        };
        let len = r.gen_range(0..=3);
        let body = (0..len)
            .map(|_| {
                if r.gen_bool(0.35) {
                    Symbol::Nonterminal(*ids.choose(r).unwrap())
                } else {
                    Symbol::Terminal(markers.choose(r).unwrap().clone())
                }
            })
            .collect();
        b.add_rule(head, body).unwrap();
    }
    b.build("S").unwrap()
}

pub fn random_extractor(r: &mut impl Rng, regular: bool) -> Extractor {
    let gamma = random_gamma(r);
    if regular {
        random_automaton(r, &gamma).into()
    } else {
        random_grammar(r, &gamma).into()
    }
}

pub fn marker(s: &str) -> Marker {
    s.parse().unwrap()
}

/// Brute-force satisfiability over all assignments.
pub fn brute_force_sat(f: &markex::reductions::CnfFormula) -> Option<Vec<bool>> {
    (0u32..1 << f.vars)
        .map(|mask| {
            (0..f.vars)
                .map(|i| mask >> i & 1 == 1)
                .collect::<Vec<bool>>()
        })
        .find(|a| f.satisfied_by(a))
}

/// Brute-force bounded PCP over all index sequences of length 1..=κ.
pub fn brute_force_pcp(p: &markex::reductions::PcpInstance) -> Option<Vec<usize>> {
    let n = p.pairs.len();
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..p.bound {
        let mut next = Vec::new();
        for s in &layer {
            for i in 1..=n {
                let mut t = s.clone();
                t.push(i);
                if p.is_solution(&t) {
                    return Some(t);
                }
                next.push(t);
            }
        }
        layer = next;
    }
    None
}

pub fn random_formula(r: &mut impl Rng, max_vars: usize) -> markex::reductions::CnfFormula {
    let vars = r.gen_range(1..=max_vars);
    let clauses = r.gen_range(1..=6 * vars + 2);
    let cs = (0..clauses)
        .map(|_| {
            let mut c = [0i32; 3];
            for l in c.iter_mut() {
                let v = r.gen_range(1..=vars as i32);
                *l = if r.gen_bool(0.5) { v } else { -v };
            }
            c
        })
        .collect();
    markex::reductions::CnfFormula::new(vars, cs).unwrap()
}

pub fn random_pcp(r: &mut impl Rng) -> markex::reductions::PcpInstance {
    let n = r.gen_range(1..=3);
    let word = |r: &mut ChaCha8Rng| -> String {
        let len = r.gen_range(1..=2);
        (0..len)
            .map(|_| if r.gen_bool(0.5) { 'a' } else { 'b' })
            .collect()
    };
    let mut local = ChaCha8Rng::seed_from_u64(r.gen());
    let pairs = (0..n)
        .map(|_| (word(&mut local), word(&mut local)))
        .collect();
    markex::reductions::PcpInstance::new(pairs, r.gen_range(1..=3)).unwrap()
}
