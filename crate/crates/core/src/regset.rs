//! Regular-language calculus on the boundary of the tree.
//!
//! For a group element `g`, `SF_g` is the set of finite words fixed by `g`
//! with trivial section, and `TF_g` is the open union of the corresponding
//! cylinders: the region where the germ of `g` is a unit. [`SfAutomaton`]
//! recognizes `SF_g`; boolean combinations of `TF` atoms and cylinders are
//! compiled into a product automaton ([`Region`]) on which nonemptiness,
//! empty interior and density are decided exactly.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::automaton::Automaton;
use crate::element::{elements_equal, is_trivial, root_perm, step, GroupElement};
use crate::error::BudgetExceeded;
use crate::word::{EvPeriodicWord, FiniteWord, Letter};

/// Classification of a boundary point against `TF_g`.
///
/// `Boundary` holds exactly when every prefix of the point stays outside
/// `SF_g` but can be extended into it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TfClass {
    Interior,
    Boundary,
    Outside,
}

/// Transition target in an [`SfAutomaton`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfTarget {
    /// The prefix read so far lies in `SF_g`; absorbing, since `SF_g` is
    /// closed under extensions.
    Accept,
    /// No extension of the prefix read so far lies in `SF_g`.
    Dead,
    State(usize),
}

/// Deterministic acceptor of `SF_g`. States are the canonical sections of
/// `g` reachable along fixed letters; a transition exists only when the
/// current section fixes the letter.
#[derive(Clone, Debug)]
pub struct SfAutomaton {
    pub elem: GroupElement,
    /// Canonical section representatives; entry 0 is `g` itself (when `g`
    /// is nontrivial).
    states: Vec<GroupElement>,
    /// `trans[s][x]`.
    trans: Vec<Vec<SfTarget>>,
    /// Whether `Accept` is reachable from each state.
    co_accessible: Vec<bool>,
    initial: SfTarget,
}

/// Cap on interned section states per SF automaton.
pub const SF_STATE_BUDGET: usize = 4096;

impl SfAutomaton {
    /// Build the acceptor of `SF_g`.
    pub fn build(aut: &Automaton, g: &GroupElement) -> Result<SfAutomaton, BudgetExceeded> {
        if is_trivial(aut, g)? {
            return Ok(SfAutomaton {
                elem: g.clone(),
                states: Vec::new(),
                trans: Vec::new(),
                co_accessible: Vec::new(),
                initial: SfTarget::Accept,
            });
        }
        let mut states: Vec<GroupElement> = vec![g.clone()];
        let mut trans: Vec<Vec<SfTarget>> = Vec::new();
        let mut at = 0usize;
        while at < states.len() {
            let cur = states[at].clone();
            let mut row = Vec::with_capacity(aut.alphabet.size);
            let perm = root_perm(aut, &cur);
            for x in aut.alphabet.letters() {
                if perm[x as usize] != x {
                    row.push(SfTarget::Dead);
                    continue;
                }
                let (_, s) = step(aut, &cur, x);
                if is_trivial(aut, &s)? {
                    row.push(SfTarget::Accept);
                    continue;
                }
                let mut found = None;
                for (i, known) in states.iter().enumerate() {
                    if *known == s || elements_equal(aut, known, &s)? {
                        found = Some(i);
                        break;
                    }
                }
                let id = match found {
                    Some(i) => i,
                    None => {
                        if states.len() >= SF_STATE_BUDGET {
                            return Err(BudgetExceeded {
                                context: "sf_automaton",
                                detail: format!("more than {} section states", SF_STATE_BUDGET),
                            });
                        }
                        states.push(s);
                        states.len() - 1
                    }
                };
                row.push(SfTarget::State(id));
            }
            trans.push(row);
            at += 1;
        }
        // Co-accessibility: states from which Accept is reachable.
        let n = states.len();
        let mut co = vec![false; n];
        loop {
            let mut changed = false;
            for s in 0..n {
                if co[s] {
                    continue;
                }
                let reaches = trans[s].iter().any(|t| match t {
                    SfTarget::Accept => true,
                    SfTarget::State(u) => co[*u],
                    SfTarget::Dead => false,
                });
                if reaches {
                    co[s] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(SfAutomaton {
            elem: g.clone(),
            states,
            trans,
            co_accessible: co,
            initial: SfTarget::State(0),
        })
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// One transition, collapsing non-co-accessible states to `Dead`.
    pub fn next(&self, t: SfTarget, x: Letter) -> SfTarget {
        match t {
            SfTarget::Accept => SfTarget::Accept,
            SfTarget::Dead => SfTarget::Dead,
            SfTarget::State(s) => match self.trans[s][x as usize] {
                SfTarget::State(u) if !self.co_accessible[u] => SfTarget::Dead,
                other => other,
            },
        }
    }

    pub fn normalized_initial(&self) -> SfTarget {
        match self.initial {
            SfTarget::State(s) if !self.co_accessible[s] => SfTarget::Dead,
            other => other,
        }
    }

    /// Run a finite word from the initial configuration.
    pub fn run(&self, u: &FiniteWord) -> SfTarget {
        let mut t = self.normalized_initial();
        for &x in u.letters() {
            t = self.next(t, x);
        }
        t
    }

    /// Whether the finite word `u` lies in `SF_g`.
    pub fn accepts(&self, u: &FiniteWord) -> bool {
        matches!(self.run(u), SfTarget::Accept)
    }

    /// Classify an infinite point against `TF_g`: accept means interior,
    /// death means no prefix is extendable, and revisiting a (state, phase)
    /// pair means the run stays co-accessible forever.
    pub fn classify(&self, omega: &EvPeriodicWord) -> TfClass {
        let mut t = self.normalized_initial();
        let mut pos = 0usize;
        let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
        loop {
            match t {
                SfTarget::Accept => return TfClass::Interior,
                SfTarget::Dead => return TfClass::Outside,
                SfTarget::State(s) => {
                    let phase = if pos < omega.preperiod_len() {
                        pos
                    } else {
                        omega.preperiod_len()
                            + (pos - omega.preperiod_len()) % omega.period_len()
                    };
                    if seen.insert((s, phase), ()).is_some() {
                        return TfClass::Boundary;
                    }
                }
            }
            t = self.next(t, omega.letter_at(pos));
            pos += 1;
        }
    }
}

/// `sf_automaton(g)`.
pub fn sf_automaton(aut: &Automaton, g: &GroupElement) -> Result<SfAutomaton, BudgetExceeded> {
    SfAutomaton::build(aut, g)
}

/// A per-call cache of SF automata, keyed by the element word (structural
/// equality; words equal in the group but spelled differently miss the
/// cache, which only costs a rebuild).
#[derive(Default)]
pub struct SfCache {
    map: HashMap<GroupElement, Arc<SfAutomaton>>,
}

impl SfCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(
        &mut self,
        aut: &Automaton,
        g: &GroupElement,
    ) -> Result<Arc<SfAutomaton>, BudgetExceeded> {
        if let Some(a) = self.map.get(g) {
            return Ok(a.clone());
        }
        let a = Arc::new(SfAutomaton::build(aut, g)?);
        self.map.insert(g.clone(), a.clone());
        Ok(a)
    }
}

/// Classify `ω` against `TF_g`.
pub fn tf_classify(
    aut: &Automaton,
    g: &GroupElement,
    omega: &EvPeriodicWord,
) -> Result<TfClass, BudgetExceeded> {
    Ok(SfAutomaton::build(aut, g)?.classify(omega))
}

/// A boolean region expression over the boundary space.
///
/// `Tf(g)` is the open set `TF_g`, `ClTf(g)` its closure, `Cyl(u)` the
/// cylinder `uX`. Atoms are anchored at the root; analyses relative to a
/// cylinder intersect with `Cyl` or start the compiled product after a
/// prefix.
#[derive(Clone, Debug)]
pub enum RegionExpr {
    Full,
    Tf(GroupElement),
    ClTf(GroupElement),
    Cyl(FiniteWord),
    Not(Box<RegionExpr>),
    Union(Vec<RegionExpr>),
    Inter(Vec<RegionExpr>),
}

impl RegionExpr {
    pub fn complement(self) -> RegionExpr {
        RegionExpr::Not(Box::new(self))
    }

    pub fn union(parts: Vec<RegionExpr>) -> RegionExpr {
        RegionExpr::Union(parts)
    }

    pub fn inter(parts: Vec<RegionExpr>) -> RegionExpr {
        RegionExpr::Inter(parts)
    }
}

/// Compiled boolean tree over atom indices.
#[derive(Clone, Debug)]
enum BExpr {
    Const(bool),
    TfLeaf(usize),
    ClTfLeaf(usize),
    CylLeaf(usize),
    Not(Box<BExpr>),
    Or(Vec<BExpr>),
    And(Vec<BExpr>),
}

impl BExpr {
    fn eval(
        &self,
        tf: &dyn Fn(usize) -> bool,
        cltf: &dyn Fn(usize) -> bool,
        cyl: &dyn Fn(usize) -> bool,
    ) -> bool {
        match self {
            BExpr::Const(v) => *v,
            BExpr::TfLeaf(i) => tf(*i),
            BExpr::ClTfLeaf(i) => cltf(*i),
            BExpr::CylLeaf(i) => cyl(*i),
            BExpr::Not(e) => !e.eval(tf, cltf, cyl),
            BExpr::Or(es) => es.iter().any(|e| e.eval(tf, cltf, cyl)),
            BExpr::And(es) => es.iter().all(|e| e.eval(tf, cltf, cyl)),
        }
    }
}

/// Per-atom component of a product state.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum AtomState {
    Accept,
    Dead,
    Live(usize),
}

/// Per-cylinder component: progress through the prefix, matched, or ruled
/// out.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum CylState {
    At(usize),
    Matched,
    Mismatch,
}

type ProductState = (Vec<AtomState>, Vec<CylState>);

/// A compiled region: SF automata for the atoms plus the fully explored
/// reachable product graph.
///
/// Once an infinite run revisits a product state, the absorbing per-atom
/// statuses are frozen: accepted atoms stay accepted, dead atoms dead, and
/// live atoms can neither accept nor die inside the cycle. So the outcome
/// of every infinite word is the profile of a reachable on-cycle state, and
/// conversely every reachable on-cycle state is realized by a lasso word.
pub struct Region {
    atoms: Vec<Arc<SfAutomaton>>,
    cyls: Vec<FiniteWord>,
    bexpr: BExpr,
    alphabet: usize,
    states: Vec<ProductState>,
    /// `edges[q][x]`.
    edges: Vec<Vec<usize>>,
    initial: usize,
    on_cycle: Vec<bool>,
    /// Truth of the expression under the outcome profile of each state.
    value: Vec<bool>,
}

impl Region {
    /// Compile an expression; structurally equal atoms are shared and the
    /// reachable product graph is explored eagerly.
    pub fn compile(aut: &Automaton, expr: &RegionExpr) -> Result<Region, BudgetExceeded> {
        Region::compile_cached(aut, expr, &mut SfCache::new())
    }

    /// Compile with a shared SF-automaton cache, for callers issuing many
    /// related queries.
    pub fn compile_cached(
        aut: &Automaton,
        expr: &RegionExpr,
        cache: &mut SfCache,
    ) -> Result<Region, BudgetExceeded> {
        let mut atoms: Vec<Arc<SfAutomaton>> = Vec::new();
        let mut atom_keys: Vec<GroupElement> = Vec::new();
        let mut cyls: Vec<FiniteWord> = Vec::new();
        let bexpr = Self::lower(aut, expr, &mut atoms, &mut atom_keys, &mut cyls, cache)?;

        let init_state: ProductState = (
            atoms
                .iter()
                .map(|a| Self::to_atom_state(a.normalized_initial()))
                .collect(),
            cyls.iter()
                .map(|u| {
                    if u.is_empty() {
                        CylState::Matched
                    } else {
                        CylState::At(0)
                    }
                })
                .collect(),
        );

        let mut states: Vec<ProductState> = vec![init_state.clone()];
        let mut index: HashMap<ProductState, usize> = HashMap::new();
        index.insert(init_state, 0);
        let mut edges: Vec<Vec<usize>> = Vec::new();
        let mut at = 0usize;
        let k = aut.alphabet.size;
        while at < states.len() {
            let (avec, cvec) = states[at].clone();
            let mut row = Vec::with_capacity(k);
            for x in aut.alphabet.letters() {
                let navec: Vec<AtomState> = avec
                    .iter()
                    .enumerate()
                    .map(|(i, st)| {
                        let t = match st {
                            AtomState::Accept => SfTarget::Accept,
                            AtomState::Dead => SfTarget::Dead,
                            AtomState::Live(s) => SfTarget::State(*s),
                        };
                        Self::to_atom_state(atoms[i].next(t, x))
                    })
                    .collect();
                let ncvec: Vec<CylState> = cvec
                    .iter()
                    .enumerate()
                    .map(|(i, st)| match st {
                        CylState::Matched => CylState::Matched,
                        CylState::Mismatch => CylState::Mismatch,
                        CylState::At(p) => {
                            if cyls[i].letters()[*p] == x {
                                if p + 1 == cyls[i].len() {
                                    CylState::Matched
                                } else {
                                    CylState::At(p + 1)
                                }
                            } else {
                                CylState::Mismatch
                            }
                        }
                    })
                    .collect();
                let key = (navec, ncvec);
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = states.len();
                        states.push(key.clone());
                        index.insert(key, id);
                        id
                    }
                };
                row.push(id);
            }
            edges.push(row);
            at += 1;
        }

        let on_cycle = Self::on_cycle_states(&edges);
        let value: Vec<bool> = states
            .iter()
            .map(|(avec, cvec)| {
                bexpr.eval(
                    &|i| matches!(avec[i], AtomState::Accept),
                    &|i| matches!(avec[i], AtomState::Accept | AtomState::Live(_)),
                    &|i| matches!(cvec[i], CylState::Matched),
                )
            })
            .collect();

        Ok(Region {
            atoms,
            cyls,
            bexpr,
            alphabet: k,
            states,
            edges,
            initial: 0,
            on_cycle,
            value,
        })
    }

    fn to_atom_state(t: SfTarget) -> AtomState {
        match t {
            SfTarget::Accept => AtomState::Accept,
            SfTarget::Dead => AtomState::Dead,
            SfTarget::State(s) => AtomState::Live(s),
        }
    }

    fn lower(
        aut: &Automaton,
        e: &RegionExpr,
        atoms: &mut Vec<Arc<SfAutomaton>>,
        atom_keys: &mut Vec<GroupElement>,
        cyls: &mut Vec<FiniteWord>,
        cache: &mut SfCache,
    ) -> Result<BExpr, BudgetExceeded> {
        Ok(match e {
            RegionExpr::Full => BExpr::Const(true),
            RegionExpr::Tf(g) | RegionExpr::ClTf(g) => {
                let idx = match atom_keys.iter().position(|k| k == g) {
                    Some(i) => i,
                    None => {
                        atoms.push(cache.get_or_build(aut, g)?);
                        atom_keys.push(g.clone());
                        atoms.len() - 1
                    }
                };
                if matches!(e, RegionExpr::Tf(_)) {
                    BExpr::TfLeaf(idx)
                } else {
                    BExpr::ClTfLeaf(idx)
                }
            }
            RegionExpr::Cyl(u) => {
                let idx = match cyls.iter().position(|k| k == u) {
                    Some(i) => i,
                    None => {
                        cyls.push(u.clone());
                        cyls.len() - 1
                    }
                };
                BExpr::CylLeaf(idx)
            }
            RegionExpr::Not(inner) => {
                BExpr::Not(Box::new(Self::lower(aut, inner, atoms, atom_keys, cyls, cache)?))
            }
            RegionExpr::Union(parts) => BExpr::Or(
                parts
                    .iter()
                    .map(|p| Self::lower(aut, p, atoms, atom_keys, cyls, cache))
                    .collect::<Result<_, _>>()?,
            ),
            RegionExpr::Inter(parts) => BExpr::And(
                parts
                    .iter()
                    .map(|p| Self::lower(aut, p, atoms, atom_keys, cyls, cache))
                    .collect::<Result<_, _>>()?,
            ),
        })
    }

    /// States lying on a directed cycle, via iterative Tarjan SCC.
    fn on_cycle_states(edges: &[Vec<usize>]) -> Vec<bool> {
        let n = edges.len();
        let mut idx = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut scc_id = vec![usize::MAX; n];
        let mut counter = 0usize;
        let mut next_scc = 0usize;
        for root in 0..n {
            if idx[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            idx[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut ei)) = call.last_mut() {
                if *ei < edges[v].len() {
                    let w = edges[v][*ei];
                    *ei += 1;
                    if idx[w] == usize::MAX {
                        idx[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(idx[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&mut (u, _)) = call.last_mut() {
                        low[u] = low[u].min(low[v]);
                    }
                    if low[v] == idx[v] {
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            scc_id[w] = next_scc;
                            if w == v {
                                break;
                            }
                        }
                        next_scc += 1;
                    }
                }
            }
        }
        let mut scc_size = vec![0usize; next_scc];
        for v in 0..n {
            scc_size[scc_id[v]] += 1;
        }
        (0..n)
            .map(|v| scc_size[scc_id[v]] > 1 || edges[v].contains(&v))
            .collect()
    }

    fn state_after(&self, u: &FiniteWord) -> usize {
        let mut q = self.initial;
        for &x in u.letters() {
            q = self.edges[q][x as usize];
        }
        q
    }

    fn reachable_from(&self, q0: usize) -> Vec<usize> {
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([q0]);
        seen[q0] = true;
        let mut out = Vec::new();
        while let Some(q) = queue.pop_front() {
            out.push(q);
            for &r in &self.edges[q] {
                if !seen[r] {
                    seen[r] = true;
                    queue.push_back(r);
                }
            }
        }
        out
    }

    fn find_witness_state(&self, q0: usize, want: bool) -> Option<usize> {
        self.reachable_from(q0)
            .into_iter()
            .find(|&q| self.on_cycle[q] && self.value[q] == want)
    }

    /// Shortest word from `q0` to `q`.
    fn word_between(&self, q0: usize, q: usize) -> FiniteWord {
        if q0 == q {
            return FiniteWord::empty();
        }
        let n = self.states.len();
        let mut prev: Vec<Option<(usize, Letter)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[q0] = true;
        let mut queue = VecDeque::from([q0]);
        while let Some(v) = queue.pop_front() {
            for x in 0..self.alphabet {
                let r = self.edges[v][x];
                if !seen[r] {
                    seen[r] = true;
                    prev[r] = Some((v, x as Letter));
                    queue.push_back(r);
                }
            }
        }
        let mut letters = Vec::new();
        let mut cur = q;
        while cur != q0 {
            let (p, x) = prev[cur].expect("target reachable");
            letters.push(x);
            cur = p;
        }
        letters.reverse();
        FiniteWord(letters)
    }

    /// A word labelling some cycle through `q`.
    fn cycle_word(&self, q: usize) -> FiniteWord {
        let n = self.states.len();
        let mut prev: Vec<Option<(usize, Letter)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for x in 0..self.alphabet {
            let r = self.edges[q][x];
            if r == q {
                return FiniteWord(vec![x as Letter]);
            }
            if !seen[r] {
                seen[r] = true;
                prev[r] = Some((q, x as Letter));
                queue.push_back(r);
            }
        }
        while let Some(v) = queue.pop_front() {
            for x in 0..self.alphabet {
                let r = self.edges[v][x];
                if r == q {
                    let mut letters = vec![x as Letter];
                    let mut cur = v;
                    while cur != q {
                        let (p, y) = prev[cur].unwrap();
                        letters.push(y);
                        cur = p;
                    }
                    letters.reverse();
                    return FiniteWord(letters);
                }
                if !seen[r] {
                    seen[r] = true;
                    prev[r] = Some((v, x as Letter));
                    queue.push_back(r);
                }
            }
        }
        unreachable!("cycle_word called on a state not on a cycle");
    }

    fn nonempty_from(&self, q0: usize) -> Option<EvPeriodicWord> {
        let q = self.find_witness_state(q0, true)?;
        let prefix = self.word_between(q0, q);
        let cycle = self.cycle_word(q);
        Some(EvPeriodicWord::new(prefix.letters(), cycle.letters()))
    }

    /// Does some point of the region exist? Returns a sample on success.
    pub fn nonempty(&self) -> Option<EvPeriodicWord> {
        self.nonempty_from(self.initial)
    }

    /// A point of the region inside `uX`, if any.
    pub fn nonempty_in(&self, u: &FiniteWord) -> Option<EvPeriodicWord> {
        let q0 = self.state_after(u);
        self.nonempty_from(q0).map(|tail| tail.with_prefix(u))
    }

    /// True iff the region contains no cylinder: from every reachable
    /// product state, a point of the complement is realizable.
    pub fn empty_interior(&self) -> bool {
        self.reachable_from(self.initial)
            .into_iter()
            .all(|q| self.find_witness_state(q, false).is_some())
    }

    /// True iff the region meets every cylinder inside `uX`.
    pub fn dense_in(&self, u: &FiniteWord) -> bool {
        let q0 = self.state_after(u);
        self.reachable_from(q0)
            .into_iter()
            .all(|q| self.find_witness_state(q, true).is_some())
    }

    /// Membership of an eventually periodic point, by direct evaluation of
    /// the expression atom by atom.
    pub fn contains_point(&self, omega: &EvPeriodicWord) -> bool {
        let tf: Vec<TfClass> = self.atoms.iter().map(|a| a.classify(omega)).collect();
        let cyl: Vec<bool> = self.cyls.iter().map(|u| omega.starts_with(u)).collect();
        self.bexpr.eval(
            &|i| tf[i] == TfClass::Interior,
            &|i| tf[i] != TfClass::Outside,
            &|i| cyl[i],
        )
    }
}

/// `region_nonempty`, building the product for a one-off query.
pub fn region_nonempty(
    aut: &Automaton,
    expr: &RegionExpr,
) -> Result<Option<EvPeriodicWord>, BudgetExceeded> {
    Ok(Region::compile(aut, expr)?.nonempty())
}

/// `region_empty_interior`.
pub fn region_empty_interior(aut: &Automaton, expr: &RegionExpr) -> Result<bool, BudgetExceeded> {
    Ok(Region::compile(aut, expr)?.empty_interior())
}

/// `region_dense_in`.
pub fn region_dense_in(
    aut: &Automaton,
    expr: &RegionExpr,
    u: &FiniteWord,
) -> Result<bool, BudgetExceeded> {
    Ok(Region::compile(aut, expr)?.dense_in(u))
}
