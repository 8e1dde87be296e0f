//! Nucleus computation for contracting automaton groups.
//!
//! The nucleus is the smallest finite set `N` such that every element's
//! sections at sufficiently large depth land in `N`. It is computed as the
//! least fixed point of "deep sections of pair products": starting from the
//! states, their inverses and the identity as a generating pool, each pair
//! product is run through the section recursion until the depth-indexed
//! section sets cycle, and every element inside the cycle is added. The
//! result is section-closed and inverse-closed, contains the identity, and
//! is minimal.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::automaton::Automaton;
use crate::element::{step, ElemId, ElementInterner, GroupElement};
use crate::error::BudgetExceeded;
use crate::word::{FiniteWord, Letter};

/// Index into [`Nucleus::elems`].
pub type NucId = usize;

/// The nucleus of a contracting automaton group, with its section transition
/// table and per-element root permutations. `elems[0]` is the identity.
#[derive(Clone, Debug)]
pub struct Nucleus {
    pub elems: Vec<GroupElement>,
    pub names: Vec<String>,
    /// `step[n][x]` is the canonical id of `n|_x`.
    pub step: Vec<Vec<NucId>>,
    /// `perm[n][x]` is `n(x)`.
    pub perm: Vec<Vec<Letter>>,
    /// `inv[n]` is the canonical id of `n^{-1}`.
    pub inv: Vec<NucId>,
}

impl Nucleus {
    pub const IDENTITY: NucId = 0;

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn element(&self, n: NucId) -> &GroupElement {
        &self.elems[n]
    }

    pub fn name(&self, n: NucId) -> &str {
        &self.names[n]
    }

    /// `n|_x` as a member of the nucleus; a table lookup.
    pub fn step(&self, n: NucId, x: Letter) -> NucId {
        self.step[n][x as usize]
    }

    /// `n(x)`.
    pub fn apply(&self, n: NucId, x: Letter) -> Letter {
        self.perm[n][x as usize]
    }

    /// Whether `n` fixes the letter `x`.
    pub fn fixes(&self, n: NucId, x: Letter) -> bool {
        self.apply(n, x) == x
    }

    /// `n|_u` tracked through the table along a finite word.
    pub fn step_word(&self, n: NucId, u: &FiniteWord) -> NucId {
        let mut cur = n;
        for &x in u.letters() {
            cur = self.step(cur, x);
        }
        cur
    }

    pub fn non_identity(&self) -> impl Iterator<Item = NucId> + '_ {
        1..self.elems.len()
    }
}

/// A certified nucleus: finite enumeration to `contraction_depth` witnesses
/// that every section of every pair product at that depth or deeper lies in
/// the nucleus.
#[derive(Clone, Debug)]
pub struct ContractionCertificate {
    pub nucleus: Nucleus,
    pub contraction_depth: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct NucleusBudget {
    pub max_elems: usize,
    pub max_depth: usize,
}

impl Default for NucleusBudget {
    fn default() -> Self {
        NucleusBudget {
            max_elems: 512,
            max_depth: 64,
        }
    }
}

/// Outcome of the budgeted nucleus search. `Inconclusive` signals an
/// exhausted budget, not a proof that the group is non-contracting.
#[derive(Clone, Debug)]
pub enum NucleusOutcome {
    Contracting(ContractionCertificate),
    Inconclusive { reason: String },
}

impl NucleusOutcome {
    pub fn certificate(self) -> Option<ContractionCertificate> {
        match self {
            NucleusOutcome::Contracting(c) => Some(c),
            NucleusOutcome::Inconclusive { .. } => None,
        }
    }
}

/// The set of interned sections of `w` at each depth, iterated until the
/// depth-indexed sets cycle; returns the union of the sets inside the cycle
/// (the sections reachable at arbitrarily large depth), or `None` when the
/// budget runs out first.
fn deep_cycle_sections(
    aut: &Automaton,
    interner: &mut ElementInterner,
    w: &GroupElement,
    budget: &NucleusBudget,
) -> Result<Option<BTreeSet<ElemId>>, BudgetExceeded> {
    let mut level: BTreeSet<ElemId> = BTreeSet::new();
    level.insert(interner.intern(aut, w)?);
    let mut seen: HashMap<Vec<ElemId>, usize> = HashMap::new();
    let mut history: Vec<BTreeSet<ElemId>> = Vec::new();
    for _depth in 0..=budget.max_depth {
        let key: Vec<ElemId> = level.iter().copied().collect();
        if let Some(&start) = seen.get(&key) {
            let mut cycle = BTreeSet::new();
            for s in &history[start..] {
                cycle.extend(s.iter().copied());
            }
            return Ok(Some(cycle));
        }
        seen.insert(key, history.len());
        history.push(level.clone());
        let mut next = BTreeSet::new();
        for &id in &level {
            let g = interner.get(id).clone();
            for x in aut.alphabet.letters() {
                let (_, s) = step(aut, &g, x);
                next.insert(interner.intern(aut, &s)?);
                if interner.len() > budget.max_elems {
                    return Ok(None);
                }
            }
        }
        level = next;
    }
    Ok(None)
}

/// Compute the nucleus within the given budget.
pub fn compute_nucleus(
    aut: &Automaton,
    budget: &NucleusBudget,
) -> Result<NucleusOutcome, BudgetExceeded> {
    let mut interner = ElementInterner::new();
    let id_e = interner.intern(aut, &GroupElement::identity())?;
    debug_assert_eq!(id_e, 0);

    let mut base: BTreeSet<ElemId> = BTreeSet::new();
    base.insert(id_e);
    for q in 0..aut.state_count() {
        if q == aut.identity {
            continue;
        }
        base.insert(interner.intern(aut, &GroupElement::state(aut, q))?);
        base.insert(interner.intern(aut, &GroupElement::state_inv(aut, q))?);
        if interner.len() > budget.max_elems {
            return Ok(NucleusOutcome::Inconclusive {
                reason: format!("more than {} canonical elements interned", budget.max_elems),
            });
        }
    }

    // Least fixed point: nucleus = deep sections of pair products over the
    // generating pool (generators and current nucleus members).
    let mut nucleus: BTreeSet<ElemId> = BTreeSet::new();
    let mut done_pairs: HashSet<(ElemId, ElemId)> = HashSet::new();
    loop {
        let pool: Vec<ElemId> = base.union(&nucleus).copied().collect();
        let mut grew = false;
        for &x in &pool {
            for &y in &pool {
                if !done_pairs.insert((x, y)) {
                    continue;
                }
                let w = GroupElement::multiply(aut, interner.get(x), interner.get(y));
                match deep_cycle_sections(aut, &mut interner, &w, budget)? {
                    Some(cycle) => {
                        for m in cycle {
                            if nucleus.insert(m) {
                                grew = true;
                            }
                        }
                    }
                    None => {
                        return Ok(NucleusOutcome::Inconclusive {
                            reason: format!(
                                "section sets of `{}` did not stabilize within depth {} and {} elements",
                                w.display(aut),
                                budget.max_depth,
                                budget.max_elems
                            ),
                        });
                    }
                }
                if interner.len() > budget.max_elems {
                    return Ok(NucleusOutcome::Inconclusive {
                        reason: format!("more than {} canonical elements interned", budget.max_elems),
                    });
                }
            }
        }
        if !grew {
            break;
        }
    }
    nucleus.insert(id_e);

    // Order members: identity first, then by (word length, word).
    let mut members: Vec<ElemId> = nucleus.iter().copied().collect();
    members.sort_by_key(|&id| {
        let g = interner.get(id);
        (id != id_e, g.len(), g.gens().to_vec())
    });

    let reindex: HashMap<ElemId, NucId> =
        members.iter().enumerate().map(|(i, &id)| (id, i)).collect();

    let elems: Vec<GroupElement> = members.iter().map(|&id| interner.get(id).clone()).collect();

    // Transition and permutation tables; the nucleus is section-closed, so
    // every section must intern onto a member.
    let mut step_tab: Vec<Vec<NucId>> = Vec::with_capacity(elems.len());
    let mut perm_tab: Vec<Vec<Letter>> = Vec::with_capacity(elems.len());
    for g in &elems {
        let mut row = Vec::new();
        let mut prow = Vec::new();
        for x in aut.alphabet.letters() {
            let (y, s) = step(aut, g, x);
            let sid = interner.intern(aut, &s)?;
            let nid = *reindex.get(&sid).ok_or(BudgetExceeded {
                context: "compute_nucleus",
                detail: "section closure violated".to_string(),
            })?;
            row.push(nid);
            prow.push(y);
        }
        step_tab.push(row);
        perm_tab.push(prow);
    }

    let mut inv_tab = Vec::with_capacity(elems.len());
    for g in &elems {
        let iid = interner.intern(aut, &g.invert())?;
        let nid = *reindex.get(&iid).ok_or(BudgetExceeded {
            context: "compute_nucleus",
            detail: "inverse closure violated".to_string(),
        })?;
        inv_tab.push(nid);
    }

    // Names: the identity and single-letter words keep their display form,
    // other members get fresh names n0, n1, ...
    let mut names = Vec::with_capacity(elems.len());
    let mut fresh = 0usize;
    for g in &elems {
        if g.len() <= 1 {
            names.push(format!("{}", g.display(aut)));
        } else {
            names.push(format!("n{}", fresh));
            fresh += 1;
        }
    }

    let nuc = Nucleus {
        elems,
        names,
        step: step_tab,
        perm: perm_tab,
        inv: inv_tab,
    };

    // Witness a contraction depth: the least depth by which the sections of
    // every pair product have landed in the nucleus.
    let mut depth_star = 0usize;
    for g in &nuc.elems {
        for h in &nuc.elems {
            let w = GroupElement::multiply(aut, g, h);
            let mut level = vec![w];
            let mut d = 0usize;
            loop {
                let mut all_in = true;
                for s in &level {
                    if interner.find(aut, s)?.map(|id| reindex.contains_key(&id)) != Some(true) {
                        all_in = false;
                        break;
                    }
                }
                if all_in {
                    break;
                }
                d += 1;
                if d > budget.max_depth {
                    return Ok(NucleusOutcome::Inconclusive {
                        reason: "contraction depth exceeded budget".to_string(),
                    });
                }
                let mut next = Vec::new();
                for s in &level {
                    for x in aut.alphabet.letters() {
                        let (_, t) = step(aut, s, x);
                        if !next.contains(&t) {
                            next.push(t);
                        }
                    }
                }
                level = next;
            }
            depth_star = depth_star.max(d);
        }
    }

    Ok(NucleusOutcome::Contracting(ContractionCertificate {
        nucleus: nuc,
        contraction_depth: depth_star,
    }))
}
