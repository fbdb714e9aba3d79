mod common;

use common::{gamma, omega, relations, to_usize, to_word};
use proptest::prelude::*;
use racgdiv_core::coxeter::{gamma_subset, GeneratorSet, NormalForm, PresentationGraph, Word};
use racgdiv_oracle::{all_words, rewriting_closure_shortlex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn agrees_with_oracle(g: &PresentationGraph, w: &[usize]) {
    let rel = relations(g);
    let nf = g.normal_form(&to_word(w)).unwrap();
    let got = to_usize(nf.letters());
    assert_eq!(rel.evaluate(&got), rel.evaluate(w), "{w:?} → {got:?} changes the element");
    assert_eq!(got, rewriting_closure_shortlex(&rel, w), "{w:?}");
}

#[test]
fn short_words_match_rewriting_closure() {
    for g in [gamma(2), omega(2)] {
        for len in 0..=4 {
            for w in all_words(g.num_generators(), len) {
                agrees_with_oracle(&g, &w);
            }
        }
    }
}

#[test]
fn random_words_match_rewriting_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for g in [gamma(2), omega(2)] {
        let n = g.num_generators();
        for _ in 0..1000 {
            let len = rng.gen_range(0..=8);
            let w: Vec<usize> = (0..len).map(|_| rng.gen_range(0..n)).collect();
            agrees_with_oracle(&g, &w);
        }
    }
}

#[test]
fn normal_form_is_shortlex_minimum_among_equal_words() {
    // Among all words of length ≤ 4 representing the same element, the
    // normal form is the ShortLex-least.
    let g = gamma(1);
    let rel = relations(&g);
    let mut best: std::collections::HashMap<Vec<i64>, Vec<usize>> = Default::default();
    for len in 0..=4 {
        for w in all_words(g.num_generators(), len) {
            best.entry(rel.evaluate(&w)).or_insert(w);
        }
    }
    for (m, w) in &best {
        let nf = g.normal_form(&to_word(w)).unwrap();
        assert_eq!(&to_usize(nf.letters()), w);
        assert_eq!(&rel.evaluate(&to_usize(nf.letters())), m);
    }
}

fn word_strategy(n: usize, max_len: usize) -> impl Strategy<Value = Vec<u16>> {
    prop::collection::vec(0..n as u16, 0..=max_len)
}

fn nf(g: &PresentationGraph, w: &[u16]) -> NormalForm {
    g.normal_form(&Word(w.to_vec())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn normal_form_is_idempotent_and_reduced(w in word_strategy(8, 14)) {
        let g = omega(2);
        let x = nf(&g, &w);
        prop_assert!(x.len() <= w.len());
        prop_assert_eq!(g.normal_form(&x.as_word()).unwrap(), x.clone());
        prop_assert!(g.is_reduced(&x.as_word()).unwrap());
    }

    #[test]
    fn product_and_inverse(u in word_strategy(8, 10), v in word_strategy(8, 10)) {
        let g = omega(2);
        let (x, y) = (nf(&g, &u), nf(&g, &v));
        let concat: Vec<u16> = u.iter().chain(&v).copied().collect();
        prop_assert_eq!(g.mul(&x, &y), nf(&g, &concat));
        prop_assert!(g.mul(&x, &g.inverse(&x)).is_identity());
        prop_assert_eq!(g.distance(&x, &y), g.distance(&y, &x));
        prop_assert_eq!(g.mul(&x, &g.left_divide(&x, &y)), y);
    }

    #[test]
    fn coset_rep_is_invariant_under_right_multiplication(
        w in word_strategy(8, 12),
        t in word_strategy(6, 6),
    ) {
        // Γ_2 occupies letters 0..6 of Ω_2.
        let g = omega(2);
        let p = gamma_subset(&g, 2).unwrap();
        let x = nf(&g, &w);
        let xt = g.mul(&x, &nf(&g, &t));
        let rep = g.coset_min_rep(&x, &p);
        prop_assert_eq!(g.coset_min_rep(&xt, &p), rep.clone());
        // The representative lies in the coset and is no longer than x.
        prop_assert!(g.subgroup_membership(&g.left_divide(&rep, &x), &p));
        prop_assert!(rep.len() <= x.len());
    }

    #[test]
    fn membership_iff_trivial_coset(w in word_strategy(8, 10), mask in 0u32..256) {
        let g = omega(2);
        let letters: Vec<u16> = (0..8).filter(|i| mask >> i & 1 == 1).collect();
        let t = GeneratorSet::new(&g, &letters).unwrap();
        let x = nf(&g, &w);
        let inside = x.letters().iter().all(|&s| t.contains(s));
        prop_assert_eq!(g.subgroup_membership(&x, &t), inside);
        prop_assert_eq!(g.coset_min_rep(&x, &t).is_identity(), inside);
    }

    #[test]
    fn coset_distance_is_translation_invariant(
        a in word_strategy(8, 6),
        b in word_strategy(8, 6),
        h in word_strategy(8, 6),
    ) {
        let g = omega(2);
        let p = gamma_subset(&g, 2).unwrap();
        let (x, y, z) = (nf(&g, &a), nf(&g, &b), nf(&g, &h));
        let d = g.distance_to_coset(&x, &y, &p);
        prop_assert_eq!(g.distance_to_coset(&g.mul(&z, &x), &g.mul(&z, &y), &p), d);
        prop_assert!(d <= g.distance(&x, &y));
    }
}
