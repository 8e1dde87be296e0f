//! The groupoid of germs over the boundary: compact open bisections given by
//! cells `(u, g, v; W)`, germ equality, dangerous points, Hausdorff-cover
//! fibers, and the regular-open criteria.

use crate::automaton::Automaton;
use crate::element::{act_word, section, GroupElement};
use crate::error::{AlgebraError, BudgetExceeded};
use crate::nucleus::{NucId, Nucleus};
use crate::regset::{tf_classify, Region, RegionExpr, TfClass};
use crate::word::{EvPeriodicWord, FiniteWord, Letter};

/// A clopen subset of the boundary, as a prefix-free list of cylinder roots.
/// The whole space is `[ε]`; the empty set is `[]`. Sibling-complete
/// families are merged on normalization.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Clopen {
    cyls: Vec<FiniteWord>,
}

impl Clopen {
    pub fn full() -> Self {
        Clopen {
            cyls: vec![FiniteWord::empty()],
        }
    }

    pub fn empty() -> Self {
        Clopen { cyls: Vec::new() }
    }

    pub fn cylinder(u: FiniteWord) -> Self {
        Clopen { cyls: vec![u] }
    }

    /// Build from arbitrary cylinders: redundant (covered) cylinders are
    /// dropped, then complete sibling families merged.
    pub fn from_cylinders(alphabet: usize, mut cyls: Vec<FiniteWord>) -> Self {
        cyls.sort();
        cyls.dedup();
        let mut kept: Vec<FiniteWord> = Vec::new();
        for c in cyls {
            if !kept.iter().any(|k| k.is_prefix_of(&c)) {
                kept.push(c);
            }
        }
        let mut set = Clopen { cyls: kept };
        set.normalize(alphabet);
        set
    }

    fn normalize(&mut self, alphabet: usize) {
        loop {
            self.cyls.sort();
            let mut merged = false;
            let mut i = 0;
            'outer: while i < self.cyls.len() {
                let w = &self.cyls[i];
                if w.is_empty() {
                    i += 1;
                    continue;
                }
                let parent = FiniteWord(w.letters()[..w.len() - 1].to_vec());
                let mut sibling_idx = Vec::new();
                for x in 0..alphabet {
                    let mut sib = parent.clone();
                    sib.push(x as Letter);
                    match self.cyls.iter().position(|c| *c == sib) {
                        Some(j) => sibling_idx.push(j),
                        None => {
                            i += 1;
                            continue 'outer;
                        }
                    }
                }
                sibling_idx.sort_unstable();
                for &j in sibling_idx.iter().rev() {
                    self.cyls.remove(j);
                }
                self.cyls.push(parent);
                merged = true;
                break;
            }
            if !merged {
                break;
            }
        }
        self.cyls.sort();
    }

    pub fn is_empty(&self) -> bool {
        self.cyls.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.cyls.len() == 1 && self.cyls[0].is_empty()
    }

    pub fn cylinders(&self) -> &[FiniteWord] {
        &self.cyls
    }

    pub fn contains_point(&self, omega: &EvPeriodicWord) -> bool {
        self.cyls.iter().any(|c| omega.starts_with(c))
    }

    /// The cylinder root of `self` containing the point, if any.
    pub fn root_of(&self, omega: &EvPeriodicWord) -> Option<&FiniteWord> {
        self.cyls.iter().find(|c| omega.starts_with(c))
    }

    pub fn intersect(&self, alphabet: usize, other: &Clopen) -> Clopen {
        let mut out = Vec::new();
        for a in &self.cyls {
            for b in &other.cyls {
                if a.is_prefix_of(b) {
                    out.push(b.clone());
                } else if b.is_prefix_of(a) {
                    out.push(a.clone());
                }
            }
        }
        Clopen::from_cylinders(alphabet, out)
    }

    /// The part of `self` inside `uX`, re-rooted at `u` (prefix stripped).
    pub fn strip_prefix(&self, alphabet: usize, u: &FiniteWord) -> Clopen {
        let mut out = Vec::new();
        for c in &self.cyls {
            if let Some(rest) = u.strip_from(c) {
                out.push(FiniteWord(rest.to_vec()));
            } else if c.is_prefix_of(u) {
                out.push(FiniteWord::empty());
            }
        }
        Clopen::from_cylinders(alphabet, out)
    }

    /// Image under `g` (a cylinder maps onto the cylinder of its image word).
    pub fn image(&self, aut: &Automaton, g: &GroupElement) -> Clopen {
        Clopen::from_cylinders(
            aut.alphabet.size,
            self.cyls.iter().map(|c| act_word(aut, g, c)).collect(),
        )
    }

    /// Preimage under `g`, i.e. the image under `g^{-1}`.
    pub fn preimage(&self, aut: &Automaton, g: &GroupElement) -> Clopen {
        self.image(aut, &g.invert())
    }

    /// As a region expression (a finite union of cylinders).
    pub fn region(&self) -> RegionExpr {
        RegionExpr::union(self.cyls.iter().map(|c| RegionExpr::Cyl(c.clone())).collect())
    }
}

/// A basic compact open bisection of the germ groupoid: the germs
/// `[u g v*, v ω]` for `ω` ranging over the clopen tail set `W`. The source
/// is `v·W` and the range `u·g(W)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cell {
    pub u: FiniteWord,
    pub g: GroupElement,
    pub v: FiniteWord,
    pub w: Clopen,
}

impl Cell {
    /// The cell `(ε, g, ε; X)` of a single group element over the whole
    /// boundary.
    pub fn of_element(g: GroupElement) -> Cell {
        Cell {
            u: FiniteWord::empty(),
            g,
            v: FiniteWord::empty(),
            w: Clopen::full(),
        }
    }

    /// The unit cell over a cylinder: the identity bisection of `uX`.
    pub fn unit(u: FiniteWord) -> Cell {
        Cell {
            u: u.clone(),
            g: GroupElement::identity(),
            v: u,
            w: Clopen::full(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Source clopen set `v·W` as a region expression.
    pub fn source_region(&self) -> RegionExpr {
        RegionExpr::union(
            self.w
                .cylinders()
                .iter()
                .map(|c| RegionExpr::Cyl(self.v.concat(c)))
                .collect(),
        )
    }

    pub fn source_contains(&self, omega: &EvPeriodicWord) -> bool {
        omega.starts_with(&self.v) && self.w.contains_point(&omega.tail(self.v.len()))
    }

    /// The germ of this cell at a point of its source.
    pub fn germ_at(&self, omega: &EvPeriodicWord) -> Option<Germ> {
        if !self.source_contains(omega) {
            return None;
        }
        Some(Germ {
            base: omega.clone(),
            u: self.u.clone(),
            g: self.g.clone(),
            v: self.v.clone(),
        })
    }
}

/// A finite union of cells; no canonical form is maintained.
#[derive(Clone, Debug, Default)]
pub struct CompactOpenSet {
    pub cells: Vec<Cell>,
}

impl CompactOpenSet {
    pub fn new(cells: Vec<Cell>) -> Self {
        CompactOpenSet {
            cells: cells.into_iter().filter(|c| !c.is_empty()).collect(),
        }
    }

    /// Whether the germ lies in some cell of the union.
    pub fn contains_germ(&self, aut: &Automaton, germ: &Germ) -> Result<bool, AlgebraError> {
        for cell in &self.cells {
            if let Some(cg) = cell.germ_at(&germ.base) {
                if germ_equal(aut, germ, &cg)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

/// A germ `[u g v*, ω]` with `ω ∈ vX`. Equality is germ equality, decided by
/// [`germ_equal`], not structural equality.
#[derive(Clone, Debug)]
pub struct Germ {
    pub base: EvPeriodicWord,
    pub u: FiniteWord,
    pub g: GroupElement,
    pub v: FiniteWord,
}

impl Germ {
    pub fn unit(omega: EvPeriodicWord) -> Germ {
        Germ {
            base: omega,
            u: FiniteWord::empty(),
            g: GroupElement::identity(),
            v: FiniteWord::empty(),
        }
    }

    pub fn of_element(g: GroupElement, omega: EvPeriodicWord) -> Germ {
        Germ {
            base: omega,
            u: FiniteWord::empty(),
            g,
            v: FiniteWord::empty(),
        }
    }

    /// The image of the base point under the arrow.
    pub fn range_point(&self, aut: &Automaton) -> Result<EvPeriodicWord, AlgebraError> {
        if !self.base.starts_with(&self.v) {
            return Err(AlgebraError::IncompatibleBase);
        }
        let tail = self.base.tail(self.v.len());
        Ok(crate::element::act_point(aut, &self.g, &tail).with_prefix(&self.u))
    }

    /// Rewrite to a deeper source leg `v'` extending `v`:
    /// `[u g v*, ω] = [u·g(z) g|_z (vz)*, ω]` for `v' = vz`.
    fn localize(&self, aut: &Automaton, v_new: &FiniteWord) -> Option<(FiniteWord, GroupElement)> {
        let z = FiniteWord(self.v.strip_from(v_new)?.to_vec());
        let u_new = self.u.concat(&act_word(aut, &self.g, &z));
        let g_new = section(aut, &self.g, &z);
        Some((u_new, g_new))
    }

    pub fn invert(&self, aut: &Automaton) -> Result<Germ, AlgebraError> {
        let base = self.range_point(aut)?;
        Ok(Germ {
            base,
            u: self.v.clone(),
            g: self.g.invert(),
            v: self.u.clone(),
        })
    }
}

/// Germ equality at a common base point: align the source legs by peeling
/// the common prefix, compare the aligned range legs, then test whether the
/// tail lies in `TF_{h^{-1} g}`.
pub fn germ_equal(aut: &Automaton, a: &Germ, b: &Germ) -> Result<bool, AlgebraError> {
    if a.base != b.base {
        return Ok(false);
    }
    if !a.base.starts_with(&a.v) || !b.base.starts_with(&b.v) {
        return Err(AlgebraError::IncompatibleBase);
    }
    // Both v-legs are prefixes of the base, so they are comparable.
    let v = if a.v.len() >= b.v.len() { &a.v } else { &b.v };
    let (ua, ga) = a.localize(aut, v).expect("legs comparable");
    let (ub, gb) = b.localize(aut, v).expect("legs comparable");
    if ua != ub {
        return Ok(false);
    }
    let tail = a.base.tail(v.len());
    let quot = GroupElement::multiply(aut, &gb.invert(), &ga);
    Ok(tf_classify(aut, &quot, &tail)? == TfClass::Interior)
}

/// Compose germs (the arrow of `a` after the arrow of `b`).
pub fn germ_compose(aut: &Automaton, a: &Germ, b: &Germ) -> Result<Option<Germ>, AlgebraError> {
    let mid = b.range_point(aut)?;
    if a.base != mid {
        return Ok(None);
    }
    // Align: write the arrow of `a` with source leg deep enough to factor
    // through the range leg of `b`.
    if a.v.len() >= b.u.len() {
        // a.v = b.u · z, so a ∘ b = (a.u, a.g · (b.g localized below z̄), …).
        let z = FiniteWord(b.u.strip_from(&a.v).expect("comparable legs").to_vec());
        // Pull z back through b.g: z̄ = b.g^{-1}(z).
        let zbar = act_word(aut, &b.g.invert(), &z);
        let gb_loc = section(aut, &b.g, &zbar);
        Ok(Some(Germ {
            base: b.base.clone(),
            u: a.u.clone(),
            g: GroupElement::multiply(aut, &a.g, &gb_loc),
            v: b.v.concat(&zbar),
        }))
    } else {
        // b.u = a.v · z: localize a below z.
        let (ua, ga) = a.localize(aut, &b.u).expect("comparable legs");
        Ok(Some(Germ {
            base: b.base.clone(),
            u: ua,
            g: GroupElement::multiply(aut, &ga, &b.g),
            v: b.v.clone(),
        }))
    }
}

/// Inverse-semigroup product of two cells; the result is empty or a single
/// cell.
pub fn compose_cells(aut: &Automaton, c1: &Cell, c2: &Cell) -> CompactOpenSet {
    let k = aut.alphabet.size;
    if c2.u == c1.v {
        // (u1 g1 v1*)(v1 g2 v2*) = u1 g1 g2 v2*, tails constrained by both.
        let w = c2.w.intersect(k, &c1.w.preimage(aut, &c2.g));
        return CompactOpenSet::new(vec![Cell {
            u: c1.u.clone(),
            g: GroupElement::multiply(aut, &c1.g, &c2.g),
            v: c2.v.clone(),
            w,
        }]);
    }
    if c1.v.is_prefix_of(&c2.u) {
        // c2.u = c1.v · z: localize c1 below z.
        let z = FiniteWord(c1.v.strip_from(&c2.u).unwrap().to_vec());
        if !c1.w.cylinders().iter().any(|c| c.comparable(&z)) {
            return CompactOpenSet::default();
        }
        let u_new = c1.u.concat(&act_word(aut, &c1.g, &z));
        let g1_loc = section(aut, &c1.g, &z);
        // Tails: in c2.w, and z-shifted into c1.w.
        let w = c2.w.intersect(k, &c1.w.strip_prefix(k, &z).preimage(aut, &c2.g));
        return CompactOpenSet::new(vec![Cell {
            u: u_new,
            g: GroupElement::multiply(aut, &g1_loc, &c2.g),
            v: c2.v.clone(),
            w,
        }]);
    }
    if c2.u.is_prefix_of(&c1.v) {
        // c1.v = c2.u · z: push z back through g2.
        let z = FiniteWord(c2.u.strip_from(&c1.v).unwrap().to_vec());
        let zbar = act_word(aut, &c2.g.invert(), &z);
        let g2_loc = section(aut, &c2.g, &zbar);
        // Tails τ: v2·z̄·τ must satisfy z̄τ ∈ c2.w and τ ∈ (pulled back c1.w).
        if !c2.w.cylinders().iter().any(|c| c.comparable(&zbar)) {
            return CompactOpenSet::default();
        }
        let w = c2
            .w
            .strip_prefix(k, &zbar)
            .intersect(k, &c1.w.preimage(aut, &g2_loc));
        return CompactOpenSet::new(vec![Cell {
            u: c1.u.clone(),
            g: GroupElement::multiply(aut, &c1.g, &g2_loc),
            v: c2.v.concat(&zbar),
            w,
        }]);
    }
    CompactOpenSet::default()
}

/// Inverse of a cell: swap the legs and invert the element.
pub fn invert_cell(aut: &Automaton, c: &Cell) -> Cell {
    Cell {
        u: c.v.clone(),
        g: c.g.invert(),
        v: c.u.clone(),
        w: c.w.image(aut, &c.g),
    }
}

/// A witness that a point is dangerous: at depth `l`, the germ of the
/// nucleus member `n` is a limit of units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DangerWitness {
    pub depth: usize,
    pub member: NucId,
}

/// Scan horizon for a point: all prefix depths up to preperiod + period need
/// examining; beyond that the tails repeat.
fn scan_depths(omega: &EvPeriodicWord) -> usize {
    omega.preperiod_len() + omega.period_len()
}

/// Non-identity nucleus members whose germ at depth `l` over `ω` is a limit
/// of units, i.e. the tail is on the boundary of their `TF` set.
fn boundary_members(
    aut: &Automaton,
    nuc: &Nucleus,
    tail: &EvPeriodicWord,
) -> Result<Vec<NucId>, BudgetExceeded> {
    let mut out = Vec::new();
    for n in nuc.non_identity() {
        if tf_classify(aut, nuc.element(n), tail)? == TfClass::Boundary {
            out.push(n);
        }
    }
    Ok(out)
}

/// Is `ω` a dangerous point, and which (depth, nucleus member) pairs witness
/// it? Only depths up to one period beyond the preperiod are examined, since
/// deeper tails repeat.
pub fn is_dangerous(
    aut: &Automaton,
    nuc: &Nucleus,
    omega: &EvPeriodicWord,
) -> Result<(bool, Vec<DangerWitness>), BudgetExceeded> {
    let mut witnesses = Vec::new();
    for l in 0..scan_depths(omega) {
        let tail = omega.tail(l);
        for n in boundary_members(aut, nuc, &tail)? {
            witnesses.push(DangerWitness { depth: l, member: n });
        }
    }
    Ok((!witnesses.is_empty(), witnesses))
}

/// Members of the stabilized germ set over `ω`, after germ-deduplication,
/// together with the least depth `L` at which the germ count saturates.
/// The identity is always a member and is listed first.
pub fn stabilized_depth(
    aut: &Automaton,
    nuc: &Nucleus,
    omega: &EvPeriodicWord,
) -> Result<(usize, Vec<NucId>), BudgetExceeded> {
    let horizon = scan_depths(omega);
    let mut per_depth: Vec<Vec<NucId>> = Vec::new();
    for l in 0..=horizon {
        let tail = omega.tail(l);
        let raw = boundary_members(aut, nuc, &tail)?;
        // Deduplicate by germ equality at the tail: n and m give the same
        // germ iff the tail lies in TF of m^{-1} n.
        let mut reps: Vec<NucId> = Vec::new();
        'next: for n in raw {
            for &m in &reps {
                let quot = GroupElement::multiply(
                    aut,
                    &nuc.element(m).invert(),
                    nuc.element(n),
                );
                if tf_classify(aut, &quot, &tail)? == TfClass::Interior {
                    continue 'next;
                }
            }
            reps.push(n);
        }
        per_depth.push(reps);
    }
    // Germ counts only grow with depth and repeat with the period, so the
    // count at the horizon is the limit.
    let target = per_depth[horizon].len();
    let depth = (0..=horizon)
        .find(|&l| per_depth[l].len() == target)
        .unwrap_or(horizon);
    let mut members = vec![Nucleus::IDENTITY];
    members.extend(per_depth[depth].iter().copied());
    Ok((depth, members))
}

/// One phase of the realizing pattern of a cover point: points entering the
/// region at this absolute depth converge to the cover point.
#[derive(Clone, Debug)]
pub struct PhasePattern {
    pub depth: usize,
    pub sample_tail: EvPeriodicWord,
}

/// A point of the Hausdorff cover over `ω`: the set of germs
/// `{[ω_L m ω_L*, ω] : m ∈ members}`, always containing the identity, with
/// a realizing pattern per phase of the tracked period.
#[derive(Clone, Debug)]
pub struct CoverPoint {
    pub base: EvPeriodicWord,
    pub depth: usize,
    pub members: Vec<NucId>,
    pub patterns: Vec<PhasePattern>,
}

impl CoverPoint {
    pub fn is_identity_only(&self) -> bool {
        self.members == [Nucleus::IDENTITY]
    }
}

/// The fiber of the Hausdorff cover over `ω`: all realizable cover points.
///
/// A subset `M` of the stabilized germ set is realizable iff at every phase
/// of one full period of tracked nucleus states, the region of points lying
/// in `TF` of every tracked member of `M` and avoiding `TF` of every other
/// tracked member is nonempty. For a non-dangerous point the fiber is the
/// singleton `{identity}`.
#[allow(clippy::needless_range_loop)]
pub fn fiber(
    aut: &Automaton,
    nuc: &Nucleus,
    omega: &EvPeriodicWord,
) -> Result<Vec<CoverPoint>, BudgetExceeded> {
    let (depth, members) = stabilized_depth(aut, nuc, omega)?;
    let others: Vec<NucId> = members[1..].to_vec();
    if others.is_empty() {
        return Ok(vec![CoverPoint {
            base: omega.clone(),
            depth,
            members,
            patterns: vec![PhasePattern {
                depth,
                sample_tail: omega.tail(depth),
            }],
        }]);
    }

    // Track the member sections along the tail until the vector of states
    // and the phase of the tail repeat; the window between the repeats is
    // one full period of the tracked system.
    let tail0 = omega.tail(depth);
    let mut track: Vec<Vec<NucId>> = vec![others.clone()];
    let mut seen: Vec<(Vec<NucId>, usize)> = Vec::new();
    let phase_of = |j: usize| -> usize {
        let pre = tail0.preperiod_len();
        if j < pre {
            j
        } else {
            pre + (j - pre) % tail0.period_len()
        }
    };
    let (cycle_start, cycle_end);
    let mut j = 0usize;
    loop {
        let key = (track[j].clone(), phase_of(j));
        if let Some(pos) = seen.iter().position(|k| *k == key) {
            cycle_start = pos;
            cycle_end = j;
            break;
        }
        seen.push(key);
        let x = tail0.letter_at(j);
        let next: Vec<NucId> = track[j].iter().map(|&m| nuc.step(m, x)).collect();
        track.push(next);
        j += 1;
    }

    let mut points = Vec::new();
    let mut cache = crate::regset::SfCache::new();
    let subset_count = 1usize << others.len();
    for mask in 0..subset_count {
        let mut patterns = Vec::new();
        let mut realizable = true;
        for phase in cycle_start..cycle_end {
            let tracked = &track[phase];
            let mut parts = Vec::new();
            for (i, &m) in tracked.iter().enumerate() {
                let atom = RegionExpr::Tf(nuc.element(m).clone());
                if mask & (1 << i) != 0 {
                    parts.push(atom);
                } else {
                    parts.push(atom.complement());
                }
            }
            let region = Region::compile_cached(aut, &RegionExpr::inter(parts), &mut cache)?;
            match region.nonempty() {
                Some(sample) => patterns.push(PhasePattern {
                    depth: depth + phase,
                    sample_tail: sample,
                }),
                None => {
                    realizable = false;
                    break;
                }
            }
        }
        if realizable {
            let mut mem = vec![Nucleus::IDENTITY];
            for (i, &m) in others.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    mem.push(m);
                }
            }
            points.push(CoverPoint {
                base: omega.clone(),
                depth,
                members: mem,
                patterns,
            });
        }
    }
    Ok(points)
}

/// The realizing pattern attached to a cover point by [`fiber`].
pub fn realizing_pattern(point: &CoverPoint) -> &[PhasePattern] {
    &point.patterns
}

/// Outcome of the extremely-dangerous-point analysis.
#[derive(Clone, Debug)]
pub enum D0Status {
    /// No dangerous points at all: the boundary of every nucleus `TF` set is
    /// empty, so the interior of the preimage of `D` in the cover is empty.
    Empty,
    /// A cylinder `v` and nucleus members whose `TF` union is dense in `vX`
    /// while missing a point of `vX`; the interior is nonempty.
    NonEmpty {
        cylinder: FiniteWord,
        members: Vec<NucId>,
        sample: EvPeriodicWord,
    },
    /// Budget exhausted without a verdict.
    Inconclusive,
}

/// Decide whether the singular part of the Hausdorff cover has empty
/// interior. `Empty` is only asserted by the complete per-member analysis
/// (no nucleus member has any boundary point); `NonEmpty` carries a
/// verified witness; everything else is `Inconclusive`.
pub fn d0_status(
    aut: &Automaton,
    nuc: &Nucleus,
    cyl_depth: usize,
) -> Result<D0Status, BudgetExceeded> {
    let mut cache = crate::regset::SfCache::new();
    // Complete analysis: D = ∅ iff no nucleus member has a boundary point,
    // i.e. every SF automaton either accepts a cylinder around every
    // co-accessible run or dies. ∂TF_n ≠ ∅ iff the region (clTF_n) \ TF_n
    // is nonempty.
    let mut any_boundary = false;
    for n in nuc.non_identity() {
        let g = nuc.element(n).clone();
        let expr = RegionExpr::inter(vec![
            RegionExpr::ClTf(g.clone()),
            RegionExpr::Tf(g).complement(),
        ]);
        if Region::compile_cached(aut, &expr, &mut cache)?.nonempty().is_some() {
            any_boundary = true;
            break;
        }
    }
    if !any_boundary {
        return Ok(D0Status::Empty);
    }

    // Witness search: a cylinder v and a set S of nucleus members with
    // ⋃ TF dense in vX and some point of vX avoiding every TF.
    let mut cylinders = vec![FiniteWord::empty()];
    let mut frontier = cylinders.clone();
    for _ in 0..cyl_depth {
        let mut next = Vec::new();
        for w in &frontier {
            for x in aut.alphabet.letters() {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        cylinders.extend(next.iter().cloned());
        frontier = next;
    }
    let non_id: Vec<NucId> = nuc.non_identity().collect();
    for size in 1..=non_id.len() {
        for subset in subsets_of_size(&non_id, size) {
            let union = RegionExpr::union(
                subset
                    .iter()
                    .map(|&n| RegionExpr::Tf(nuc.element(n).clone()))
                    .collect(),
            );
            let region = Region::compile_cached(aut, &union, &mut cache)?;
            for v in &cylinders {
                if region.dense_in(v) {
                    let complement = RegionExpr::inter(vec![
                        RegionExpr::Cyl(v.clone()),
                        union.clone().complement(),
                    ]);
                    if let Some(sample) =
                        Region::compile_cached(aut, &complement, &mut cache)?.nonempty()
                    {
                        return Ok(D0Status::NonEmpty {
                            cylinder: v.clone(),
                            members: subset,
                            sample,
                        });
                    }
                }
            }
        }
    }
    Ok(D0Status::Inconclusive)
}

fn subsets_of_size(pool: &[NucId], size: usize) -> Vec<Vec<NucId>> {
    let mut out = Vec::new();
    let n = pool.len();
    let mut idx: Vec<usize> = (0..size).collect();
    if size > n {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| pool[i]).collect());
        // Advance the combination.
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - size {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Candidate branch arrows for regular-open analysis: the aligned forms of
/// the set's own cells plus nucleus members localized over the cylinder.
fn candidate_branches(
    aut: &Automaton,
    nuc: &Nucleus,
    set: &CompactOpenSet,
    q: &FiniteWord,
) -> Vec<(FiniteWord, GroupElement)> {
    let mut branches: Vec<(FiniteWord, GroupElement)> = Vec::new();
    let mut push = |b: (FiniteWord, GroupElement)| {
        if !branches.contains(&b) {
            branches.push(b);
        }
    };
    // Localized forms of the cells whose source covers qX.
    for cell in &set.cells {
        if cell.v.is_prefix_of(q) {
            let z = FiniteWord(cell.v.strip_from(q).unwrap().to_vec());
            if cell.w.cylinders().iter().any(|c| c.comparable(&z)) {
                let u_loc = cell.u.concat(&act_word(aut, &cell.g, &z));
                let g_loc = section(aut, &cell.g, &z);
                push((u_loc.clone(), g_loc.clone()));
                // Same range leg, nucleus-perturbed arrows.
                for n in 0..nuc.len() {
                    push((
                        u_loc.clone(),
                        GroupElement::multiply(aut, &g_loc, nuc.element(n)),
                    ));
                    push((
                        u_loc.clone(),
                        GroupElement::multiply(aut, nuc.element(n), &g_loc),
                    ));
                }
            }
        }
    }
    // Unit-leg branches over q itself.
    for n in 0..nuc.len() {
        push((q.clone(), nuc.element(n).clone()));
    }
    branches
}

/// Decide (to the cylinder-depth budget) whether the compact open set
/// equals the interior of its closure. A violation is a basic cell
/// `(u', h, q)` whose germs all lie in the closure of the set while some
/// germ escapes the set itself.
pub fn regular_open(
    aut: &Automaton,
    nuc: &Nucleus,
    set: &CompactOpenSet,
    cyl_depth: usize,
) -> Result<bool, AlgebraError> {
    Ok(find_violation(aut, nuc, set, cyl_depth)?.is_none())
}

/// The violating cell, if one is found within the budget.
fn find_violation(
    aut: &Automaton,
    nuc: &Nucleus,
    set: &CompactOpenSet,
    cyl_depth: usize,
) -> Result<Option<Cell>, AlgebraError> {
    let mut cache = crate::regset::SfCache::new();
    let mut cylinders = vec![FiniteWord::empty()];
    let mut frontier = cylinders.clone();
    for _ in 0..cyl_depth {
        let mut next = Vec::new();
        for w in &frontier {
            for x in aut.alphabet.letters() {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        cylinders.extend(next.iter().cloned());
        frontier = next;
    }
    for q in &cylinders {
        // Cells with sources strictly below q cannot be localized at q;
        // any violation over such a source is found at a deeper cylinder
        // (the escape region survives restriction to subcylinders).
        if set
            .cells
            .iter()
            .any(|cell| q.is_prefix_of(&cell.v) && *q != cell.v)
        {
            continue;
        }
        for (u_b, h) in candidate_branches(aut, nuc, set, q) {
            // Match regions of the branch against each cell, relative to qX.
            let mut inside = Vec::new();
            let mut in_closure = Vec::new();
            for cell in &set.cells {
                if !cell.v.is_prefix_of(q) {
                    continue;
                }
                let z = FiniteWord(cell.v.strip_from(q).unwrap().to_vec());
                if !cell.w.cylinders().iter().any(|c| c.comparable(&z)) {
                    continue;
                }
                let u_loc = cell.u.concat(&act_word(aut, &cell.g, &z));
                if u_loc != u_b {
                    continue;
                }
                let g_loc = section(aut, &cell.g, &z);
                let quot = GroupElement::multiply(aut, &g_loc.invert(), &h);
                // Tail constraint of the cell inside qX.
                let wq = cell.w.strip_prefix(aut.alphabet.size, &z);
                let guard = wq.region();
                inside.push(RegionExpr::inter(vec![
                    guard.clone(),
                    RegionExpr::Tf(quot.clone()),
                ]));
                in_closure.push(RegionExpr::inter(vec![guard, RegionExpr::ClTf(quot)]));
            }
            if inside.is_empty() {
                continue;
            }
            // Contained in the closure: no tail escapes every closure-match.
            let escapes_closure = RegionExpr::union(in_closure).complement();
            if Region::compile_cached(aut, &escapes_closure, &mut cache)?
                .nonempty()
                .is_some()
            {
                continue;
            }
            // Not contained in the set: some tail escapes every match.
            let escapes_set = RegionExpr::union(inside).complement();
            if Region::compile_cached(aut, &escapes_set, &mut cache)?
                .nonempty()
                .is_some()
            {
                return Ok(Some(Cell {
                    u: u_b,
                    g: h,
                    v: q.clone(),
                    w: Clopen::full(),
                }));
            }
        }
    }
    Ok(None)
}

/// Outcome of the non-regular-open search.
#[derive(Clone, Debug)]
pub enum NonRegularOutcome {
    /// A compact open set that is not regular open, verified in-process.
    Found(CompactOpenSet),
    /// No witness exists: all compact opens are regular open (certified via
    /// emptiness of the singular part).
    NoneCertified,
    /// Nothing found within the budget.
    NoneAtBudget,
}

/// Search for a compact open set that is not regular open. Driven by the
/// D0 analysis: a dense-union witness yields the non-regular-open union of
/// the member cells over the cylinder.
pub fn find_nonregular_witness(
    aut: &Automaton,
    nuc: &Nucleus,
    cyl_depth: usize,
) -> Result<NonRegularOutcome, AlgebraError> {
    match d0_status(aut, nuc, cyl_depth)? {
        D0Status::Empty => Ok(NonRegularOutcome::NoneCertified),
        D0Status::Inconclusive => Ok(NonRegularOutcome::NoneAtBudget),
        D0Status::NonEmpty {
            cylinder, members, ..
        } => {
            let cells: Vec<Cell> = members
                .iter()
                .map(|&n| Cell {
                    u: cylinder.clone(),
                    g: nuc.element(n).clone(),
                    v: cylinder.clone(),
                    w: Clopen::full(),
                })
                .collect();
            let set = CompactOpenSet::new(cells);
            if regular_open(aut, nuc, &set, cyl_depth.max(cylinder.len()))? {
                return Err(AlgebraError::VerificationFailed(
                    "constructed witness tested regular open".to_string(),
                ));
            }
            Ok(NonRegularOutcome::Found(set))
        }
    }
}

/// Deduplicate germs of nucleus members at a common point (used by tests and
/// the fiber machinery).
pub fn germ_distinct_members(
    aut: &Automaton,
    nuc: &Nucleus,
    members: &[NucId],
    tail: &EvPeriodicWord,
) -> Result<Vec<NucId>, BudgetExceeded> {
    let mut reps: Vec<NucId> = Vec::new();
    'next: for &n in members {
        for &m in &reps {
            let quot = GroupElement::multiply(aut, &nuc.element(m).invert(), nuc.element(n));
            if tf_classify(aut, &quot, tail)? == TfClass::Interior {
                continue 'next;
            }
        }
        reps.push(n);
    }
    Ok(reps)
}

/// Names of nucleus members, for report rendering.
pub fn member_names(nuc: &Nucleus, members: &[NucId]) -> Vec<String> {
    members.iter().map(|&m| nuc.name(m).to_string()).collect()
}

/// All subsets enumeration helper for tests.
pub fn all_subsets(pool: &[NucId]) -> Vec<Vec<NucId>> {
    let mut out = Vec::new();
    for mask in 0..(1usize << pool.len()) {
        out.push(
            pool.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &n)| n)
                .collect(),
        );
    }
    out
}

/// Check that members of a cover point are pairwise germ-distinct.
pub fn members_pairwise_distinct(
    aut: &Automaton,
    nuc: &Nucleus,
    point: &CoverPoint,
) -> Result<bool, AlgebraError> {
    let prefix = point.base.prefix(point.depth);
    let mut germs = Vec::new();
    for &m in &point.members {
        germs.push(Germ {
            base: point.base.clone(),
            u: prefix.clone(),
            g: nuc.element(m).clone(),
            v: prefix.clone(),
        });
    }
    for i in 0..germs.len() {
        for j in i + 1..germs.len() {
            if germ_equal(aut, &germs[i], &germs[j])? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
