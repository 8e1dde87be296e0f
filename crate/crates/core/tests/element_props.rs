//! Randomized invariants of the tree action and the word problem, with a
//! fixed seed for reproducibility.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use ssg_core::element::{
    act_point, act_word, elements_equal, is_trivial, section, step, Gen, GroupElement,
};
use ssg_core::samples;
use ssg_core::word::{EvPeriodicWord, FiniteWord, Letter};
use ssg_core::Automaton;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5567_1245)
}

fn random_element(aut: &Automaton, rng: &mut ChaCha8Rng, max_len: usize) -> GroupElement {
    let len = rng.gen_range(0..=max_len);
    let gens: Vec<Gen> = (0..len)
        .map(|_| Gen {
            state: rng.gen_range(0..aut.state_count()),
            inv: rng.gen_bool(0.5),
        })
        .collect();
    GroupElement::from_gens(aut, gens)
}

fn random_word(aut: &Automaton, rng: &mut ChaCha8Rng, max_len: usize) -> FiniteWord {
    let len = rng.gen_range(0..=max_len);
    FiniteWord(
        (0..len)
            .map(|_| rng.gen_range(0..aut.alphabet.size) as Letter)
            .collect(),
    )
}

fn random_point(aut: &Automaton, rng: &mut ChaCha8Rng) -> EvPeriodicWord {
    let pre = random_word(aut, rng, 3);
    let per_len = rng.gen_range(1..=3);
    let per: Vec<Letter> = (0..per_len)
        .map(|_| rng.gen_range(0..aut.alphabet.size) as Letter)
        .collect();
    EvPeriodicWord::new(pre.letters(), &per)
}

#[test]
fn action_cocycle_identities() {
    // act_word(g, uv) = act_word(g, u) · act_word(g|_u, v) and
    // section(g, uv) = section(g|_u, v), on 500 random triples.
    let mut rng = rng();
    for aut in [samples::grigorchuk(), samples::gupta_sidki3()] {
        for _ in 0..250 {
            let g = random_element(&aut, &mut rng, 4);
            let u = random_word(&aut, &mut rng, 6);
            let v = random_word(&aut, &mut rng, 6);
            let uv = u.concat(&v);
            let lhs = act_word(&aut, &g, &uv);
            let rhs = act_word(&aut, &g, &u).concat(&act_word(&aut, &section(&aut, &g, &u), &v));
            assert_eq!(lhs, rhs);
            assert_eq!(
                section(&aut, &g, &uv),
                section(&aut, &section(&aut, &g, &u), &v)
            );
        }
    }
}

#[test]
fn step_respects_products() {
    // (gh)(x) = g(h(x)) and (gh)|_x = g|_{h(x)} h|_x, on 500 random pairs.
    let mut rng = rng();
    for aut in [samples::grigorchuk(), samples::grigorchuk_erschler()] {
        for _ in 0..250 {
            let g = random_element(&aut, &mut rng, 4);
            let h = random_element(&aut, &mut rng, 4);
            let x = rng.gen_range(0..aut.alphabet.size) as Letter;
            let gh = GroupElement::multiply(&aut, &g, &h);
            let (y, s) = step(&aut, &gh, x);
            let (hx, hsec) = step(&aut, &h, x);
            let (ghx, gsec) = step(&aut, &g, hx);
            assert_eq!(y, ghx);
            let expected = GroupElement::multiply(&aut, &gsec, &hsec);
            assert!(elements_equal(&aut, &s, &expected).unwrap());
        }
    }
}

#[test]
fn inverses_act_trivially() {
    // w·w^{-1} is trivial for 200 random words.
    let mut rng = rng();
    let aut = samples::grigorchuk();
    for _ in 0..200 {
        let w = random_element(&aut, &mut rng, 5);
        let prod = GroupElement::multiply(&aut, &w, &w.invert());
        assert!(is_trivial(&aut, &prod).unwrap());
    }
}

#[test]
fn point_action_inverts() {
    // act_point(g, act_point(g^{-1}, ω)) = ω for 200 random pairs.
    let mut rng = rng();
    for aut in [samples::grigorchuk(), samples::odometer()] {
        for _ in 0..100 {
            let g = random_element(&aut, &mut rng, 4);
            let omega = random_point(&aut, &mut rng);
            let there = act_point(&aut, &g.invert(), &omega);
            let back = act_point(&aut, &g, &there);
            assert_eq!(back, omega);
        }
    }
}

#[test]
fn word_problem_agrees_with_exhaustive_action() {
    // is_trivial(g) iff g fixes every word of length 8, for all Grigorchuk
    // words of length <= 3.
    let aut = samples::grigorchuk();
    let mut words: Vec<GroupElement> = vec![GroupElement::identity()];
    let mut frontier: Vec<Vec<Gen>> = vec![Vec::new()];
    for _ in 0..3 {
        let mut next = Vec::new();
        for w in &frontier {
            for q in 0..aut.state_count() {
                if q == aut.identity {
                    continue;
                }
                for inv in [false, true] {
                    let mut v = w.clone();
                    v.push(Gen { state: q, inv });
                    next.push(v);
                }
            }
        }
        for v in &next {
            words.push(GroupElement::from_gens(&aut, v.clone()));
        }
        frontier = next;
    }
    words.sort();
    words.dedup();

    let mut depth8 = Vec::new();
    let mut level = vec![FiniteWord::empty()];
    for _ in 0..8 {
        let mut next = Vec::new();
        for w in &level {
            for x in aut.alphabet.letters() {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        level = next;
    }
    depth8.extend(level);

    for g in &words {
        let fast = is_trivial(&aut, g).unwrap();
        let slow = depth8.iter().all(|u| act_word(&aut, g, u) == *u);
        assert_eq!(fast, slow, "word {:?}", g);
    }
}

#[test]
fn known_relations_hold() {
    let aut = samples::grigorchuk();
    let parse = |s: &str| GroupElement::parse(&aut, s).unwrap();
    for (lhs, rhs) in [
        ("b.c", "d"),
        ("c.d", "b"),
        ("b.d", "c"),
        ("b.b", ""),
        ("c.c", ""),
        ("d.d", ""),
        ("a.a", ""),
    ] {
        assert!(elements_equal(&aut, &parse(lhs), &parse(rhs)).unwrap());
    }
    assert!(!elements_equal(&aut, &parse("a.b"), &parse("b.a")).unwrap());
}
