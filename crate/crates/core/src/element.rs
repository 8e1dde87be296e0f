//! Group elements as freely reduced signed words over the automaton states,
//! acting on the rooted tree by wreath recursion, plus the word problem.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::automaton::{Automaton, StateId};
use crate::error::BudgetExceeded;
use crate::word::{EvPeriodicWord, FiniteWord, Letter};

/// One letter of a group word: a state or its inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Gen {
    pub state: StateId,
    pub inv: bool,
}

impl Gen {
    fn inverse(self) -> Gen {
        Gen {
            state: self.state,
            inv: !self.inv,
        }
    }
}

/// A freely reduced word `g_1 g_2 … g_k` over the states and their inverses.
/// The word acts on the tree rightmost-first: `g_k` is applied first. The
/// empty word is the group identity; identity-state letters never occur.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupElement {
    word: Vec<Gen>,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement { word: Vec::new() }
    }

    pub fn state(aut: &Automaton, q: StateId) -> Self {
        GroupElement::from_gens(aut, vec![Gen { state: q, inv: false }])
    }

    pub fn state_inv(aut: &Automaton, q: StateId) -> Self {
        GroupElement::from_gens(aut, vec![Gen { state: q, inv: true }])
    }

    /// Build from a raw letter sequence, dropping identity-state letters and
    /// freely reducing.
    pub fn from_gens(aut: &Automaton, gens: Vec<Gen>) -> Self {
        let mut word: Vec<Gen> = Vec::with_capacity(gens.len());
        for g in gens {
            if g.state == aut.identity {
                continue;
            }
            if let Some(&last) = word.last() {
                if last.state == g.state && last.inv != g.inv {
                    word.pop();
                    continue;
                }
            }
            word.push(g);
        }
        GroupElement { word }
    }

    pub fn gens(&self) -> &[Gen] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn is_identity_word(&self) -> bool {
        self.word.is_empty()
    }

    /// Concatenation with free reduction; no group relations are applied.
    pub fn multiply(aut: &Automaton, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let mut gens = g.word.clone();
        gens.extend_from_slice(&h.word);
        GroupElement::from_gens(aut, gens)
    }

    pub fn invert(&self) -> GroupElement {
        GroupElement {
            word: self.word.iter().rev().map(|g| g.inverse()).collect(),
        }
    }

    /// Parse the literal syntax `b.c.d'` (names joined with `.`, trailing
    /// `'` marks an inverse). The identity name or the empty string denote
    /// the identity element.
    pub fn parse(aut: &Automaton, s: &str) -> Result<GroupElement, String> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(GroupElement::identity());
        }
        let mut gens = Vec::new();
        for part in s.split('.') {
            let part = part.trim();
            if part.is_empty() {
                return Err("empty name in element literal".to_string());
            }
            let (name, inv) = match part.strip_suffix('\'') {
                Some(n) => (n, true),
                None => (part, false),
            };
            let q = aut
                .state_by_name(name)
                .ok_or_else(|| format!("unknown state `{}`", name))?;
            gens.push(Gen { state: q, inv });
        }
        Ok(GroupElement::from_gens(aut, gens))
    }

    pub fn display<'a>(&'a self, aut: &'a Automaton) -> ElementDisplay<'a> {
        ElementDisplay { elem: self, aut }
    }
}

pub struct ElementDisplay<'a> {
    elem: &'a GroupElement,
    aut: &'a Automaton,
}

impl fmt::Display for ElementDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elem.word.is_empty() {
            return write!(f, "{}", self.aut.name(self.aut.identity));
        }
        let parts: Vec<String> = self
            .elem
            .word
            .iter()
            .map(|g| {
                let mut s = self.aut.name(g.state).to_string();
                if g.inv {
                    s.push('\'');
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join("."))
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "1");
        }
        for g in &self.word {
            write!(f, "{}{}", g.state, if g.inv { "'" } else { "" })?;
        }
        Ok(())
    }
}

/// `(q^{±1})(x)` and `(q^{±1})|_x` for a single signed letter.
fn gen_step(aut: &Automaton, g: Gen, x: Letter) -> (Letter, Gen) {
    if !g.inv {
        (
            aut.perm(g.state, x),
            Gen {
                state: aut.sect(g.state, x),
                inv: false,
            },
        )
    } else {
        let y = aut.perm_inv(g.state, x);
        (
            y,
            Gen {
                state: aut.sect(g.state, y),
                inv: true,
            },
        )
    }
}

/// `(g(x), g|_x)`: one level of the wreath recursion, computed right to left
/// through the word.
pub fn step(aut: &Automaton, g: &GroupElement, x: Letter) -> (Letter, GroupElement) {
    let mut y = x;
    let mut rev_sections: Vec<Gen> = Vec::with_capacity(g.word.len());
    for gen in g.word.iter().rev() {
        let (y2, s) = gen_step(aut, *gen, y);
        y = y2;
        rev_sections.push(s);
    }
    rev_sections.reverse();
    (y, GroupElement::from_gens(aut, rev_sections))
}

/// The image `g(u)` of a finite word.
pub fn act_word(aut: &Automaton, g: &GroupElement, u: &FiniteWord) -> FiniteWord {
    let mut cur = g.clone();
    let mut out = Vec::with_capacity(u.len());
    for &x in u.letters() {
        let (y, next) = step(aut, &cur, x);
        out.push(y);
        cur = next;
    }
    FiniteWord(out)
}

/// The section `g|_u`.
pub fn section(aut: &Automaton, g: &GroupElement, u: &FiniteWord) -> GroupElement {
    let mut cur = g.clone();
    for &x in u.letters() {
        let (_, next) = step(aut, &cur, x);
        cur = next;
    }
    cur
}

/// The image of an eventually periodic point under `g`. Sections of `g`
/// along the period are words of bounded length, so the pair
/// (section, phase) eventually cycles and the image is eventually periodic.
pub fn act_point(aut: &Automaton, g: &GroupElement, omega: &EvPeriodicWord) -> EvPeriodicWord {
    let mut pre_out = Vec::new();
    let mut cur = g.clone();
    for &x in omega.preperiod() {
        let (y, next) = step(aut, &cur, x);
        pre_out.push(y);
        cur = next;
    }
    // Emit whole periods until the section repeats.
    let per = omega.period();
    let mut seen: Vec<GroupElement> = vec![cur.clone()];
    let mut blocks: Vec<Vec<Letter>> = Vec::new();
    loop {
        let mut block = Vec::with_capacity(per.len());
        for &x in per {
            let (y, next) = step(aut, &cur, x);
            block.push(y);
            cur = next;
        }
        blocks.push(block);
        if let Some(pos) = seen.iter().position(|s| *s == cur) {
            // Blocks before `pos` extend the preperiod, the rest repeat.
            for b in &blocks[..pos] {
                pre_out.extend_from_slice(b);
            }
            let mut period = Vec::new();
            for b in &blocks[pos..] {
                period.extend_from_slice(b);
            }
            return EvPeriodicWord::new(&pre_out, &period);
        }
        seen.push(cur.clone());
    }
}

/// The permutation of letters induced by `g` at the root.
pub fn root_perm(aut: &Automaton, g: &GroupElement) -> Vec<Letter> {
    aut.alphabet
        .letters()
        .map(|x| {
            let mut y = x;
            for gen in g.word.iter().rev() {
                y = if !gen.inv {
                    aut.perm(gen.state, y)
                } else {
                    aut.perm_inv(gen.state, y)
                };
            }
            y
        })
        .collect()
}

fn root_perm_is_trivial(aut: &Automaton, g: &GroupElement) -> bool {
    root_perm(aut, g).iter().enumerate().all(|(x, &y)| x as Letter == y)
}

/// Default node budget for the word-problem closure.
pub const DEFAULT_TRIVIALITY_BUDGET: usize = 1_000_000;

/// Decide whether `g` acts trivially on the whole tree, by breadth-first
/// closure of `{g}` under sections. Every reached section must have the
/// identity letter permutation. Sections of a word have the same length, so
/// the closure is finite; the budget turns a pathological blow-up into an
/// explicit resource error rather than a wrong answer.
pub fn is_trivial_budgeted(
    aut: &Automaton,
    g: &GroupElement,
    budget: usize,
) -> Result<bool, BudgetExceeded> {
    let mut visited: HashSet<GroupElement> = HashSet::new();
    let mut queue: VecDeque<GroupElement> = VecDeque::new();
    queue.push_back(g.clone());
    visited.insert(g.clone());
    while let Some(w) = queue.pop_front() {
        if !root_perm_is_trivial(aut, &w) {
            return Ok(false);
        }
        for x in aut.alphabet.letters() {
            let (_, s) = step(aut, &w, x);
            if !visited.contains(&s) {
                if visited.len() >= budget {
                    return Err(BudgetExceeded {
                        context: "is_trivial",
                        detail: format!("more than {} reached sections", budget),
                    });
                }
                visited.insert(s.clone());
                queue.push_back(s);
            }
        }
    }
    Ok(true)
}

/// `is_trivial` with the default budget.
pub fn is_trivial(aut: &Automaton, g: &GroupElement) -> Result<bool, BudgetExceeded> {
    is_trivial_budgeted(aut, g, DEFAULT_TRIVIALITY_BUDGET)
}

/// Equality of tree actions, via `is_trivial(g h^{-1})`.
pub fn elements_equal(
    aut: &Automaton,
    g: &GroupElement,
    h: &GroupElement,
) -> Result<bool, BudgetExceeded> {
    is_trivial(aut, &GroupElement::multiply(aut, g, &h.invert()))
}

/// Interns group elements up to equality of tree actions. Elements with
/// distinct level-2 action signatures are never compared with the word
/// problem, which keeps `elements_equal` calls near-minimal.
#[derive(Default)]
pub struct ElementInterner {
    elems: Vec<GroupElement>,
    by_sig: std::collections::HashMap<Vec<Letter>, Vec<usize>>,
}

/// Interned canonical element id.
pub type ElemId = usize;

impl ElementInterner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn get(&self, id: ElemId) -> &GroupElement {
        &self.elems[id]
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elems
    }

    /// Action on all words of length 2, flattened.
    fn signature(aut: &Automaton, g: &GroupElement) -> Vec<Letter> {
        let mut sig = Vec::new();
        for x in aut.alphabet.letters() {
            let (y, s) = step(aut, g, x);
            sig.push(y);
            for x2 in aut.alphabet.letters() {
                let (y2, _) = step(aut, &s, x2);
                sig.push(y2);
            }
        }
        sig
    }

    /// Intern `g`, returning the id of its canonical representative. The
    /// first word seen for an action stays the canonical representative.
    pub fn intern(&mut self, aut: &Automaton, g: &GroupElement) -> Result<ElemId, BudgetExceeded> {
        let sig = Self::signature(aut, g);
        if let Some(bucket) = self.by_sig.get(&sig) {
            for &id in bucket {
                if self.elems[id] == *g || elements_equal(aut, &self.elems[id], g)? {
                    return Ok(id);
                }
            }
        }
        let id = self.elems.len();
        self.elems.push(g.clone());
        self.by_sig.entry(sig).or_default().push(id);
        Ok(id)
    }

    /// Look up `g` without inserting.
    pub fn find(&self, aut: &Automaton, g: &GroupElement) -> Result<Option<ElemId>, BudgetExceeded> {
        let sig = Self::signature(aut, g);
        if let Some(bucket) = self.by_sig.get(&sig) {
            for &id in bucket {
                if self.elems[id] == *g || elements_equal(aut, &self.elems[id], g)? {
                    return Ok(Some(id));
                }
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::{grigorchuk, odometer};

    #[test]
    fn free_reduction_contract() {
        let aut = grigorchuk();
        let a = GroupElement::parse(&aut, "a").unwrap();
        let ai = a.invert();
        assert!(GroupElement::multiply(&aut, &a, &ai).is_identity_word());
        let b = GroupElement::parse(&aut, "b").unwrap();
        let c = GroupElement::parse(&aut, "c").unwrap();
        let bc = GroupElement::multiply(&aut, &b, &c);
        // Free reduction only: `bc` has length 2 even though bc = d in the group.
        assert_eq!(bc.len(), 2);
        let bci = GroupElement::parse(&aut, "c'.b'").unwrap();
        assert_eq!(bc.invert(), bci);
        assert_eq!(bc.invert().invert(), bc);
    }

    #[test]
    fn grigorchuk_steps() {
        let aut = grigorchuk();
        let b = GroupElement::parse(&aut, "b").unwrap();
        let a = GroupElement::parse(&aut, "a").unwrap();
        let (y, s) = step(&aut, &b, 0);
        assert_eq!(y, 0);
        assert_eq!(s, a);
        let (y, s) = step(&aut, &a, 0);
        assert_eq!(y, 1);
        assert!(s.is_identity_word());
        let id = GroupElement::identity();
        let (y, s) = step(&aut, &id, 1);
        assert_eq!(y, 1);
        assert!(s.is_identity_word());
    }

    #[test]
    fn act_and_section_along_words() {
        let aut = grigorchuk();
        let b = GroupElement::parse(&aut, "b").unwrap();
        let d = GroupElement::parse(&aut, "d").unwrap();
        let u = FiniteWord::from_letters(&[1, 1]);
        assert_eq!(act_word(&aut, &b, &u), u);
        assert_eq!(section(&aut, &b, &u), d);
        let e = FiniteWord::empty();
        assert_eq!(act_word(&aut, &b, &e), e);
        assert_eq!(section(&aut, &b, &e), b);
        let dd = GroupElement::parse(&aut, "d").unwrap();
        assert!(section(&aut, &dd, &FiniteWord::from_letters(&[0])).is_identity_word());
    }

    #[test]
    fn act_point_examples() {
        let grig = grigorchuk();
        let b = GroupElement::parse(&grig, "b").unwrap();
        let ones = EvPeriodicWord::constant(1);
        assert_eq!(act_point(&grig, &b, &ones), ones);

        let odo = odometer();
        let a = GroupElement::parse(&odo, "a").unwrap();
        // The odometer adds one with carry: 1^∞ + 1 = 0^∞.
        assert_eq!(act_point(&odo, &a, &ones), EvPeriodicWord::constant(0));
        // 0^∞ + 1 = 1 0^∞.
        assert_eq!(
            act_point(&odo, &a, &EvPeriodicWord::constant(0)),
            EvPeriodicWord::new(&[1], &[0])
        );
        let id = GroupElement::identity();
        let w = EvPeriodicWord::parse("01(10)").unwrap();
        assert_eq!(act_point(&grig, &id, &w), w);
    }

    #[test]
    fn word_problem_examples() {
        let aut = grigorchuk();
        let aa = GroupElement::parse(&aut, "a.a").unwrap();
        assert!(is_trivial(&aut, &aa).unwrap());
        let bcd = GroupElement::parse(&aut, "b.c.d'").unwrap();
        assert!(is_trivial(&aut, &bcd).unwrap());
        let b = GroupElement::parse(&aut, "b").unwrap();
        assert!(!is_trivial(&aut, &b).unwrap());
        let bc = GroupElement::parse(&aut, "b.c").unwrap();
        let d = GroupElement::parse(&aut, "d").unwrap();
        assert!(elements_equal(&aut, &bc, &d).unwrap());
        assert!(elements_equal(&aut, &b, &b).unwrap());
        let a = GroupElement::parse(&aut, "a").unwrap();
        assert!(!elements_equal(&aut, &a, &b).unwrap());
    }

    #[test]
    fn budget_is_an_error_not_a_verdict() {
        let aut = grigorchuk();
        let w = GroupElement::parse(&aut, "b.a.c.a.d.a.b.a").unwrap();
        assert!(matches!(
            is_trivial_budgeted(&aut, &w, 1),
            Err(BudgetExceeded { .. })
        ));
    }
}
