//! Property tests for canonical eventually periodic words.

use proptest::prelude::*;

use ssg_core::word::{EvPeriodicWord, FiniteWord};

fn letters(max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, 0..=max_len)
}

fn period(max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, 1..=max_len)
}

proptest! {
    #[test]
    fn equality_iff_same_letters(pre in letters(4), per in period(4), shift in 0usize..6) {
        // Shifting the representation never changes the word.
        let w = EvPeriodicWord::new(&pre, &per);
        let mut pre2 = pre.clone();
        for i in 0..shift {
            pre2.push(per[i % per.len()]);
        }
        let mut per2 = per.clone();
        per2.rotate_left(shift % per.len());
        let w2 = EvPeriodicWord::new(&pre2, &per2);
        prop_assert_eq!(&w, &w2);
        for i in 0..16 {
            prop_assert_eq!(w.letter_at(i), w2.letter_at(i));
        }
    }

    #[test]
    fn distinct_words_differ_somewhere(
        pre_a in letters(3), per_a in period(3),
        pre_b in letters(3), per_b in period(3),
    ) {
        let a = EvPeriodicWord::new(&pre_a, &per_a);
        let b = EvPeriodicWord::new(&pre_b, &per_b);
        // Two eventually periodic words with preperiods <= 3 and periods
        // <= 3 that agree on a long enough prefix are equal.
        let horizon = 3 + 3 * 3 + 3;
        let agree = (0..horizon).all(|i| a.letter_at(i) == b.letter_at(i));
        prop_assert_eq!(a == b, agree);
    }

    #[test]
    fn tail_then_prefix_round_trips(pre in letters(4), per in period(4), l in 0usize..10) {
        let w = EvPeriodicWord::new(&pre, &per);
        let back = w.tail(l).with_prefix(&w.prefix(l));
        prop_assert_eq!(back, w);
    }

    #[test]
    fn prefixes_are_prefixes(pre in letters(4), per in period(4), l in 0usize..10) {
        let w = EvPeriodicWord::new(&pre, &per);
        prop_assert!(w.starts_with(&w.prefix(l)));
        let p = w.prefix(l);
        prop_assert!(FiniteWord(p.letters()[..l / 2].to_vec()).is_prefix_of(&p));
    }
}
