use std::collections::BTreeSet;
use std::path::PathBuf;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pattern_spectra::enumerate::{growth_estimates, pyramid_count};
use pattern_spectra::graphs::*;
use pattern_spectra::pattern::{patterns_of_descent_set, permutations};
use pattern_spectra::{DescentSet, DescentWord, PatternSet};

fn set(s: &str) -> PatternSet {
    s.parse().unwrap()
}

fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden file {name}");
}

fn words(ws: &[&str]) -> DescentSet {
    DescentSet::new(ws[0].len(), ws.iter().map(|w| w.parse().unwrap())).unwrap()
}

#[test]
fn golden_graphs() {
    golden("overlap_empty_m2.dot", &build_overlap_graph(&PatternSet::empty(2).unwrap()).to_dot());
    golden("overlap_132_231.dot", &build_overlap_graph(&set("{132,231}")).to_dot());
    golden("de_bruijn_aa_bb.dot", &build_de_bruijn(&words(&["aa", "bb"])).unwrap().to_dot());
}

#[test]
fn golden_verdicts() {
    let u = words(&["aa"]);
    let cases = [
        ("verdict_213.json", classify(&set("{213}"), None).unwrap()),
        ("verdict_132_231.json", classify(&set("{132,231}"), None).unwrap()),
        ("verdict_d_aa.json", classify(&patterns_of_descent_set(&u), Some(&u)).unwrap()),
    ];
    for (name, v) in cases {
        golden(name, &(serde_json::to_string_pretty(&v).unwrap() + "\n"));
    }
}

#[test]
fn edge_count_is_allowed_windows() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in 1..=4 {
        let all: Vec<_> = permutations(m + 1).collect();
        for _ in 0..20 {
            let s = PatternSet::new(m, all.iter().filter(|_| rng.gen_bool(0.2)).cloned()).unwrap();
            let g = build_overlap_graph(&s);
            assert_eq!(g.edges().len(), all.len() - s.len());
            assert_eq!(g.vertices().len(), all.len() / (m + 1));
        }
    }
}

// Mapping every vertex and label of G_{S(U)} to its descent word gives
// exactly the edges of D_U.
#[test]
fn overlap_graph_maps_onto_de_bruijn() {
    for m in 2..=4 {
        let all: Vec<DescentWord> = DescentWord::all(m).collect();
        let mut choices: Vec<Vec<DescentWord>> = vec![vec![]];
        for (i, a) in all.iter().enumerate() {
            choices.push(vec![a.clone()]);
            for b in &all[i + 1..] {
                choices.push(vec![a.clone(), b.clone()]);
            }
        }
        for ws in choices {
            let u = DescentSet::new(m, ws).unwrap();
            let g = build_overlap_graph(&patterns_of_descent_set(&u));
            let d = build_de_bruijn(&u).unwrap();
            let image: BTreeSet<(usize, usize, DescentWord)> = g
                .edges()
                .iter()
                .map(|(a, b, tau)| {
                    let da = g.vertices()[*a].descent_word().unwrap().index();
                    let db = g.vertices()[*b].descent_word().unwrap().index();
                    (da, db, tau.descent_word().unwrap())
                })
                .collect();
            let target: BTreeSet<(usize, usize, DescentWord)> = d.edges().iter().cloned().collect();
            assert_eq!(image, target, "U = {u}");
        }
    }
}

fn cycle_lengths(g: &SimpleDigraph, limit: usize) -> Vec<usize> {
    // Simple cycles by DFS from each start, visiting only larger vertices;
    // capped in both cycles found and steps taken.
    let mut adj = vec![Vec::new(); g.n];
    for &(a, b) in &g.edges {
        adj[a].push(b);
    }
    let mut out = Vec::new();
    for start in 0..g.n {
        let mut stack = vec![(start, 0usize, 0usize)];
        let mut on_path = vec![false; g.n];
        let mut steps = 0;
        while let Some((v, next, depth)) = stack.pop() {
            steps += 1;
            if next == 0 {
                on_path[v] = true;
            }
            if next < adj[v].len() && out.len() < limit && steps < 100_000 {
                stack.push((v, next + 1, depth));
                let w = adj[v][next];
                if w == start {
                    out.push(depth + 1);
                } else if !on_path[w] && w > start {
                    stack.push((w, 0, depth + 1));
                }
            } else {
                on_path[v] = false;
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn period_divides_cycle_lengths(n in 2usize..64, extra in 0usize..40, stride in 1usize..5, seed in any::<u64>()) {
        // A ring of n vertices plus random chords, strongly connected by construction.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let jump = stride * rng.gen_range(1..=n);
            edges.push((a, (a + jump) % n));
        }
        let g = SimpleDigraph { n, edges };
        prop_assert!(strongly_connected(&g).unwrap());
        let d = period(&g).unwrap();
        for len in cycle_lengths(&g, 2000) {
            prop_assert_eq!(len % d, 0);
        }
    }
}

#[test]
fn certified_sets_have_stable_growth_ratios() {
    let all: Vec<_> = permutations(3).collect();
    let mut certified = 0;
    for mask in 1u32..64 {
        let s = PatternSet::new(2, all.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p.clone()))
            .unwrap();
        if !classify(&s, None).unwrap().certifies_simple_dominant() {
            continue;
        }
        certified += 1;
        let est = growth_estimates(&pyramid_count(&s, 25)).unwrap();
        let last: Vec<f64> = est.iter().rev().filter_map(|e| e.ratio_estimate).take(5).collect();
        let (lo, hi) = last.iter().fold((f64::INFINITY, 0f64), |(l, h), &x| (l.min(x), h.max(x)));
        assert!((hi - lo) / hi < 1e-3, "{s}: {last:?}");
    }
    assert!(certified > 0);
}
