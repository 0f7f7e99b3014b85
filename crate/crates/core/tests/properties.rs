use proptest::prelude::*;

use pattern_spectra::enumerate::{brute_force_count, pyramid_count};
use pattern_spectra::pattern::{descent_word, parse_pattern_spec, permutations, standardize};
use pattern_spectra::{Pattern, PatternSet};

fn pattern(k: usize) -> impl Strategy<Value = Pattern> {
    Just((1..=k).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Pattern::new(v).unwrap())
}

fn pattern_set(m: usize) -> impl Strategy<Value = PatternSet> {
    let all: Vec<Pattern> = permutations(m + 1).collect();
    proptest::sample::subsequence(all.clone(), 0..=all.len()).prop_map(move |ps| PatternSet::new(m, ps).unwrap())
}

proptest! {
    #[test]
    fn standardize_recovers_relative_order(xs in proptest::collection::btree_set(-1000i32..1000, 2..9).prop_map(|s| s.into_iter().collect::<Vec<_>>()).prop_shuffle()) {
        let p = standardize(&xs).unwrap();
        for i in 0..xs.len() {
            for j in 0..xs.len() {
                prop_assert_eq!(xs[i] < xs[j], p.entries()[i] < p.entries()[j]);
            }
        }
        prop_assert_eq!(standardize(p.entries()).unwrap(), p.clone());
        prop_assert_eq!(descent_word(&xs).unwrap(), p.descent_word().unwrap());
    }

    #[test]
    fn symmetries_are_involutions(p in (1usize..8).prop_flat_map(pattern)) {
        prop_assert_eq!(p.complement().complement(), p.clone());
        prop_assert_eq!(p.reverse().reverse(), p.clone());
        prop_assert_eq!(p.complement().reverse(), p.reverse().complement());
        prop_assert_eq!(Pattern::from_rank(p.len(), p.rank()), p.clone());
    }

    #[test]
    fn set_text_round_trip(s in (1usize..4).prop_flat_map(pattern_set)) {
        let text = s.to_string();
        prop_assert_eq!(text.parse::<PatternSet>().unwrap(), s.clone());
        prop_assert_eq!(parse_pattern_spec(&text).unwrap().set, s);
    }

    #[test]
    fn counts_invariant_under_symmetries(s in pattern_set(2)) {
        let base = pyramid_count(&s, 9);
        for image in [s.complement(), s.reverse(), s.reverse().complement()] {
            let t = pyramid_count(&image, 9);
            prop_assert_eq!(t.counts(), base.counts());
        }
    }

    #[test]
    fn pyramid_matches_brute_force_m3(s in pattern_set(3)) {
        let t = pyramid_count(&s, 7);
        for n in 0..=7 {
            prop_assert_eq!(t.get(n).unwrap(), &brute_force_count(&s, n).unwrap());
        }
    }

    #[test]
    fn probabilities_never_increase(s in pattern_set(2)) {
        let t = pyramid_count(&s, 15);
        for n in 1..15 {
            prop_assert!(t.exact_probability(n + 1).unwrap() <= t.exact_probability(n).unwrap());
        }
    }
}
