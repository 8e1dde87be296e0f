//! Condition (S_t): candidate bisection families with a common source,
//! realizable overlap patterns, span tests over `Q` and `Z/tZ`, witness
//! search, explicit singular elements, and simplicity reports.
//!
//! A family `U_1, .., U_n` of bisections with common source satisfies the
//! condition when every exclusive part `U_i \ (∪_{j≠i} U_j)` is nonempty
//! with empty interior and the pattern vectors `b_I` (over the realizable
//! overlap patterns `I`) span a proper submodule of `R_t^n`. Such a family
//! yields a nonzero singular element `Σ a_i · 1_{U_i}` for any functional
//! `a` vanishing on the span.

use crate::automaton::Automaton;
use crate::element::{act_word, GroupElement};
use crate::error::{AlgebraError, BudgetExceeded};
use crate::groupoid::Clopen;
use crate::nucleus::Nucleus;
use crate::regset::{Region, RegionExpr};
use crate::steinberg::{is_singular, is_zero, AlgebraElement, Ring, Scalar};
use crate::word::{EvPeriodicWord, FiniteWord};

/// A candidate family: cells `(v, g_i, v; W)` over a common clopen source
/// `V = v·W`, localized so that the elements sit at the cylinder root.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub elems: Vec<GroupElement>,
    /// Root cylinder of the common source.
    pub v: FiniteWord,
    /// Tail set below the root; the source is `v·W`.
    pub w: Clopen,
}

impl Candidate {
    pub fn over_cylinder(elems: Vec<GroupElement>, v: FiniteWord) -> Self {
        Candidate {
            elems,
            v,
            w: Clopen::full(),
        }
    }

    pub fn n(&self) -> usize {
        self.elems.len()
    }

    /// Ambient constraint of the source, relative to the root space.
    fn ambient(&self) -> RegionExpr {
        RegionExpr::union(
            self.w
                .cylinders()
                .iter()
                .map(|c| RegionExpr::Cyl(self.v.concat(c)))
                .collect(),
        )
    }

    /// `TF_{g_j^{-1} g_i}`: where the germs of `g_i` and `g_j` coincide.
    fn coincidence(&self, aut: &Automaton, i: usize, j: usize) -> RegionExpr {
        RegionExpr::Tf(GroupElement::multiply(
            aut,
            &self.elems[j].invert(),
            &self.elems[i],
        ))
    }
}

/// The realizable overlap patterns `I ⊆ {0, .., n-1}`, `#I > 1`, each with a
/// sample point where exactly the germs indexed by `I` coincide.
#[derive(Clone, Debug)]
pub struct PatternFamily {
    pub n: usize,
    pub realizable: Vec<(Vec<usize>, EvPeriodicWord)>,
}

impl PatternFamily {
    pub fn index_sets(&self) -> Vec<&[usize]> {
        self.realizable.iter().map(|(i, _)| i.as_slice()).collect()
    }
}

/// Compute the realizable patterns: `I` is realizable iff some point of the
/// source lies in every pairwise coincidence set of `I` and outside every
/// coincidence with the complement.
pub fn realizable_patterns(
    aut: &Automaton,
    cand: &Candidate,
) -> Result<PatternFamily, BudgetExceeded> {
    realizable_patterns_cached(aut, cand, &mut crate::regset::SfCache::new())
}

fn realizable_patterns_cached(
    aut: &Automaton,
    cand: &Candidate,
    cache: &mut crate::regset::SfCache,
) -> Result<PatternFamily, BudgetExceeded> {
    let n = cand.n();
    let mut realizable = Vec::new();
    for mask in 0..(1usize << n) {
        let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if members.len() < 2 {
            continue;
        }
        let mut parts = vec![cand.ambient()];
        for (pos, &i) in members.iter().enumerate() {
            for &i2 in &members[pos + 1..] {
                parts.push(cand.coincidence(aut, i, i2));
            }
        }
        for j in 0..n {
            if mask & (1 << j) != 0 {
                continue;
            }
            for &i in &members {
                parts.push(cand.coincidence(aut, i, j).complement());
            }
        }
        if let Some(sample) =
            Region::compile_cached(aut, &RegionExpr::inter(parts), cache)?.nonempty()
        {
            realizable.push((members, sample));
        }
    }
    Ok(PatternFamily { n, realizable })
}

/// Per-element analysis of the exclusive part `U_i \ (∪_{j≠i} U_j)`.
#[derive(Clone, Debug)]
pub struct ExclusivePart {
    pub nonempty: bool,
    pub empty_interior: bool,
    pub sample: Option<EvPeriodicWord>,
}

/// Analyze every exclusive part.
pub fn exclusive_parts(
    aut: &Automaton,
    cand: &Candidate,
) -> Result<Vec<ExclusivePart>, BudgetExceeded> {
    exclusive_parts_cached(aut, cand, &mut crate::regset::SfCache::new())
}

fn exclusive_parts_cached(
    aut: &Automaton,
    cand: &Candidate,
    cache: &mut crate::regset::SfCache,
) -> Result<Vec<ExclusivePart>, BudgetExceeded> {
    let n = cand.n();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut parts = vec![cand.ambient()];
        for j in 0..n {
            if j != i {
                parts.push(cand.coincidence(aut, i, j).complement());
            }
        }
        let region = Region::compile_cached(aut, &RegionExpr::inter(parts), cache)?;
        let sample = region.nonempty();
        out.push(ExclusivePart {
            nonempty: sample.is_some(),
            empty_interior: region.empty_interior(),
            sample,
        });
    }
    Ok(out)
}

/// Result of the span analysis of the pattern vectors.
#[derive(Clone, Debug)]
pub struct SpanResult {
    pub full: bool,
    /// A nonzero functional `a` with `a · b_I = 0` for every realizable `I`,
    /// as canonical integer representatives in `R_t`.
    pub kernel: Option<Vec<i64>>,
}

/// Rank of an integer matrix over `Q` (fraction-free elimination); also
/// returns a primitive integer kernel vector of the transpose restricted to
/// the column space test: here rows are the `b_I` and we seek `a` with
/// `b_I · a = 0`.
fn rational_kernel(rows: &[Vec<i64>], n: usize) -> Option<Vec<i64>> {
    // Gaussian elimination over Q on the rows; then solve for a vector in
    // the null space of the row span.
    let mut mat: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..n {
        let Some(pr) = (rank..mat.len()).find(|&r| mat[r][col] != 0) else {
            continue;
        };
        mat.swap(rank, pr);
        let (head, tail) = mat.split_at_mut(rank + 1);
        let prow = &head[rank];
        for row in tail.iter_mut() {
            if row[col] != 0 {
                let a = prow[col];
                let b = row[col];
                for k in 0..n {
                    row[k] = row[k] * a - prow[k] * b;
                }
                let g = row.iter().fold(0i128, |acc, &x| gcd_i128(acc, x));
                if g > 1 {
                    for x in row.iter_mut() {
                        *x /= g;
                    }
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == mat.len() {
            break;
        }
    }
    if rank == n {
        return None;
    }
    // Free column: the first non-pivot; back-substitute a rational solution.
    let free = (0..n).find(|c| !pivots.contains(c)).unwrap();
    let mut sol: Vec<num_rational::Ratio<i128>> = vec![num_rational::Ratio::from_integer(0); n];
    sol[free] = num_rational::Ratio::from_integer(1);
    for r in (0..rank).rev() {
        let col = pivots[r];
        let mut acc = num_rational::Ratio::from_integer(0);
        for c in col + 1..n {
            acc += num_rational::Ratio::from_integer(mat[r][c]) * sol[c];
        }
        sol[col] = -acc / num_rational::Ratio::from_integer(mat[r][col]);
    }
    // Clear denominators to a primitive integer vector with positive first
    // nonzero entry.
    let lcm = sol
        .iter()
        .fold(1i128, |acc, x| lcm_i128(acc, *x.denom()));
    let mut out: Vec<i128> = sol.iter().map(|x| x.numer() * (lcm / x.denom())).collect();
    let g = out.iter().fold(0i128, |acc, &x| gcd_i128(acc, x));
    if g > 1 {
        for x in out.iter_mut() {
            *x /= g;
        }
    }
    if let Some(first) = out.iter().find(|&&x| x != 0) {
        if *first < 0 {
            for x in out.iter_mut() {
                *x = -*x;
            }
        }
    }
    Some(out.iter().map(|&x| x as i64).collect())
}

/// Kernel vector mod a prime `p`, if the rows do not span `(F_p)^n`.
#[allow(clippy::needless_range_loop)]
fn kernel_mod_p(rows: &[Vec<i64>], n: usize, p: u64) -> Option<Vec<u64>> {
    let p = p as i128;
    let modp = |x: i128| -> i128 { x.rem_euclid(p) };
    let mut mat: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| modp(x as i128)).collect())
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    let inv_mod = |a: i128| -> i128 {
        // p is prime and a != 0 mod p.
        let mut result = 1i128;
        let mut base = modp(a);
        let mut exp = p - 2;
        while exp > 0 {
            if exp & 1 == 1 {
                result = modp(result * base);
            }
            base = modp(base * base);
            exp >>= 1;
        }
        result
    };
    for col in 0..n {
        let Some(pr) = (rank..mat.len()).find(|&r| mat[r][col] != 0) else {
            continue;
        };
        mat.swap(rank, pr);
        let inv = inv_mod(mat[rank][col]);
        for k in 0..n {
            mat[rank][k] = modp(mat[rank][k] * inv);
        }
        for r in 0..mat.len() {
            if r != rank && mat[r][col] != 0 {
                let factor = mat[r][col];
                for k in 0..n {
                    mat[r][k] = modp(mat[r][k] - factor * mat[rank][k]);
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == mat.len() {
            break;
        }
    }
    if rank == n {
        return None;
    }
    let free = (0..n).find(|c| !pivots.contains(c)).unwrap();
    let mut sol = vec![0i128; n];
    sol[free] = 1;
    for (r, &col) in pivots.iter().enumerate() {
        // Row r is reduced: sol[col] = -mat[r][free] (rows were fully
        // reduced above).
        sol[col] = modp(-mat[r][free]);
    }
    Some(sol.iter().map(|&x| x as u64).collect())
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm_i128(a: i128, b: i128) -> i128 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd_i128(a, b)) * b
}

fn prime_divisors(mut t: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= t {
        if t.is_multiple_of(p) {
            out.push(p);
            while t.is_multiple_of(p) {
                t /= p;
            }
        }
        p += 1;
    }
    if t > 1 {
        out.push(t);
    }
    out
}

/// Decide whether the pattern vectors `b_I` span all of `R_t^n` (`t = 0`
/// meaning `Q`); when they do not, produce a nonzero functional vanishing
/// on the span. Surjectivity over `Z/tZ` is checked via ranks over `F_p`
/// for every prime `p | t`; a kernel vector mod `p` lifts by multiplication
/// with `t/p`.
pub fn span_full(patterns: &[&[usize]], n: usize, t: u64) -> SpanResult {
    let rows: Vec<Vec<i64>> = patterns
        .iter()
        .map(|idx| {
            let mut row = vec![0i64; n];
            for &i in idx.iter() {
                row[i] = 1;
            }
            row
        })
        .collect();
    if t == 0 {
        match rational_kernel(&rows, n) {
            None => SpanResult {
                full: true,
                kernel: None,
            },
            Some(kernel) => SpanResult {
                full: false,
                kernel: Some(kernel),
            },
        }
    } else {
        // Prefer an integer kernel (reduced mod t) when one exists and
        // stays nonzero; it matches the rational functional on the nose.
        if let Some(int_kernel) = rational_kernel(&rows, n) {
            let reduced: Vec<i64> = int_kernel
                .iter()
                .map(|&x| x.rem_euclid(t as i64))
                .collect();
            if reduced.iter().any(|&x| x != 0) {
                return SpanResult {
                    full: false,
                    kernel: Some(reduced),
                };
            }
        }
        for p in prime_divisors(t) {
            if let Some(kp) = kernel_mod_p(&rows, n, p) {
                let lift = (t / p) as i64;
                let kernel: Vec<i64> = kp
                    .iter()
                    .map(|&x| ((x as i64) * lift).rem_euclid(t as i64))
                    .collect();
                return SpanResult {
                    full: false,
                    kernel: Some(kernel),
                };
            }
        }
        SpanResult {
            full: true,
            kernel: None,
        }
    }
}

/// A verified witness of condition (S_t).
#[derive(Clone, Debug)]
pub struct SWitness {
    pub candidate: Candidate,
    pub patterns: PatternFamily,
    pub exclusive: Vec<ExclusivePart>,
    pub t: u64,
    pub kernel: Vec<i64>,
}

/// Which bullet of the condition failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StFailure {
    /// Some exclusive part is empty or has nonempty interior.
    ExclusivePart { index: usize },
    /// The pattern vectors span everything.
    SpanFull,
}

/// Verdict of the (S_t) check for one candidate.
#[derive(Clone, Debug)]
pub enum StVerdict {
    Holds(SWitness),
    Fails(StFailure),
}

/// Check the three bullets of condition (S_t) for a candidate.
pub fn check_st(aut: &Automaton, cand: &Candidate, t: u64) -> Result<StVerdict, BudgetExceeded> {
    check_st_cached(aut, cand, t, &mut crate::regset::SfCache::new())
}

fn check_st_cached(
    aut: &Automaton,
    cand: &Candidate,
    t: u64,
    cache: &mut crate::regset::SfCache,
) -> Result<StVerdict, BudgetExceeded> {
    let exclusive = exclusive_parts_cached(aut, cand, cache)?;
    for (i, part) in exclusive.iter().enumerate() {
        if !part.nonempty || !part.empty_interior {
            return Ok(StVerdict::Fails(StFailure::ExclusivePart { index: i }));
        }
    }
    let patterns = realizable_patterns_cached(aut, cand, cache)?;
    let span = span_full(&patterns.index_sets(), cand.n(), t);
    match span.kernel {
        Some(kernel) => Ok(StVerdict::Holds(SWitness {
            candidate: cand.clone(),
            patterns,
            exclusive,
            t,
            kernel,
        })),
        None => Ok(StVerdict::Fails(StFailure::SpanFull)),
    }
}

/// Search budget for [`search_witness`].
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub max_n: usize,
    pub elem_ball: usize,
    pub cyl_depth: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_n: 4,
            elem_ball: 2,
            cyl_depth: 2,
        }
    }
}

/// Canonical distinct products of up to `ball` nucleus members, identity
/// first, ordered by (word length, word).
pub fn nucleus_ball(
    aut: &Automaton,
    nuc: &Nucleus,
    ball: usize,
) -> Result<Vec<GroupElement>, BudgetExceeded> {
    let mut interner = crate::element::ElementInterner::new();
    let mut pool: Vec<GroupElement> = vec![GroupElement::identity()];
    interner.intern(aut, &pool[0])?;
    let mut frontier = pool.clone();
    for _ in 0..ball {
        let mut next = Vec::new();
        for g in &frontier {
            for m in nuc.non_identity() {
                let h = GroupElement::multiply(aut, g, nuc.element(m));
                let before = interner.len();
                let id = interner.intern(aut, &h)?;
                if id == before {
                    // Newly interned: genuinely new element.
                    next.push(h);
                }
            }
        }
        pool.extend(next.iter().cloned());
        frontier = next;
    }
    pool.sort_by_key(|g| (g.len(), g.gens().to_vec()));
    Ok(pool)
}

/// Search for an (S_t) witness among candidates with elements from the
/// nucleus-product ball placed over a common cylinder, ordered by
/// (n, total word length, cylinder depth). `None` means nothing was found
/// within the budget — explicitly not a proof of absence.
pub fn search_witness(
    aut: &Automaton,
    nuc: &Nucleus,
    t: u64,
    budget: &SearchBudget,
) -> Result<Option<SWitness>, BudgetExceeded> {
    let pool = nucleus_ball(aut, nuc, budget.elem_ball)?;
    let mut cylinders = vec![FiniteWord::empty()];
    let mut frontier = cylinders.clone();
    for _ in 0..budget.cyl_depth {
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

    let mut cache = crate::regset::SfCache::new();
    for n in 2..=budget.max_n.min(pool.len()) {
        // Subsets of size n, ordered by total word length then
        // lexicographically by indices.
        let mut subsets: Vec<Vec<usize>> = combinations(pool.len(), n);
        subsets.sort_by_key(|idx| {
            (
                idx.iter().map(|&i| pool[i].len()).sum::<usize>(),
                idx.clone(),
            )
        });
        for idx in subsets {
            let elems: Vec<GroupElement> = idx.iter().map(|&i| pool[i].clone()).collect();
            for v in &cylinders {
                let cand = Candidate::over_cylinder(elems.clone(), v.clone());
                if let StVerdict::Holds(w) = check_st_cached(aut, &cand, t, &mut cache)? {
                    return Ok(Some(w));
                }
            }
        }
    }
    Ok(None)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Build the explicit singular element `f = Σ a_i · 1_{U_i}` from a witness
/// and verify in-process that it is nonzero and singular.
pub fn build_singular(aut: &Automaton, witness: &SWitness) -> Result<AlgebraElement, AlgebraError> {
    let ring = Ring::from_t(witness.t);
    let mut terms = Vec::new();
    for (i, g) in witness.candidate.elems.iter().enumerate() {
        let coeff = ring.from_integer(witness.kernel[i]);
        if coeff.is_zero() {
            continue;
        }
        terms.push((
            coeff,
            crate::groupoid::Cell {
                u: witness.candidate.v.clone(),
                g: g.clone(),
                v: witness.candidate.v.clone(),
                w: witness.candidate.w.clone(),
            },
        ));
    }
    let f = AlgebraElement::from_terms(ring, terms)?;
    if is_zero(aut, &f)? {
        return Err(AlgebraError::VerificationFailed(
            "constructed element is semantically zero".to_string(),
        ));
    }
    if !is_singular(aut, &f)? {
        return Err(AlgebraError::VerificationFailed(
            "constructed element is not singular".to_string(),
        ));
    }
    Ok(f)
}

/// Level-transitivity of the generated group on `A^l` for `l <= depth`.
pub fn level_transitive(aut: &Automaton, depth: usize) -> usize {
    let mut gens: Vec<GroupElement> = Vec::new();
    for q in 0..aut.state_count() {
        if q != aut.identity {
            gens.push(GroupElement::state(aut, q));
            gens.push(GroupElement::state_inv(aut, q));
        }
    }
    let mut reached = 0usize;
    for l in 1..=depth {
        let target = (aut.alphabet.size as u64).pow(l as u32);
        let start = FiniteWord(vec![0; l]);
        let mut seen = std::collections::HashSet::new();
        seen.insert(start.clone());
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(w) = queue.pop_front() {
            for g in &gens {
                let img = act_word(aut, g, &w);
                if seen.insert(img.clone()) {
                    queue.push_back(img);
                }
            }
        }
        if seen.len() as u64 == target {
            reached = l;
        } else {
            break;
        }
    }
    reached
}

/// Bounded effectiveness check: search for a nucleus-ball element `n` and a
/// cylinder `v` such that `n` fixes every point of `vX` while `vX ∩ TF_n`
/// has empty interior. For faithful automaton groups such a violation would
/// force `n|_v` to be trivial, so none is expected; the search is evidence,
/// not proof.
pub fn effectiveness_violation(
    aut: &Automaton,
    nuc: &Nucleus,
    ball: usize,
    cyl_depth: usize,
) -> Result<Option<(GroupElement, FiniteWord)>, BudgetExceeded> {
    let pool = nucleus_ball(aut, nuc, ball)?;
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
    for g in pool.iter().filter(|g| !g.is_identity_word()) {
        for v in &cylinders {
            if act_word(aut, g, v) != *v {
                continue;
            }
            let below = crate::element::section(aut, g, v);
            if !crate::element::is_trivial(aut, &below)? {
                continue;
            }
            // Every point of vX is fixed. The violation additionally needs
            // vX ∩ TF_g with empty interior.
            let expr = RegionExpr::inter(vec![
                RegionExpr::Cyl(v.clone()),
                RegionExpr::Tf(g.clone()),
            ]);
            if Region::compile(aut, &expr)?.empty_interior() {
                return Ok(Some((g.clone(), v.clone())));
            }
        }
    }
    Ok(None)
}

/// Combined verdict of a simplicity report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimplicityVerdict {
    /// An (S_p) witness exists: the Steinberg algebra over any field of
    /// characteristic `p` is not simple.
    NotSimple,
    /// Bounded evidence only: level-transitive to the budget, no
    /// effectiveness violation, and no (S_p) witness at the budget.
    ConsistentWithSimple,
    Inconclusive,
}

/// A simplicity report for fields of characteristic `p`: minimality and
/// effectiveness proxies (bounded evidence) plus the (S_p) search outcome.
#[derive(Clone, Debug)]
pub struct SimplicityReport {
    pub characteristic: u64,
    pub level_transitive_to: usize,
    pub level_budget: usize,
    pub effectiveness_violation: Option<(GroupElement, FiniteWord)>,
    pub witness: Option<SWitness>,
    pub verdict: SimplicityVerdict,
}

/// Assemble the report.
pub fn simplicity_report(
    aut: &Automaton,
    nuc: &Nucleus,
    characteristic: u64,
    level_budget: usize,
    search: &SearchBudget,
) -> Result<SimplicityReport, BudgetExceeded> {
    let level = level_transitive(aut, level_budget);
    let violation = effectiveness_violation(aut, nuc, search.elem_ball, search.cyl_depth)?;
    let witness = search_witness(aut, nuc, characteristic, search)?;
    let verdict = if witness.is_some() {
        SimplicityVerdict::NotSimple
    } else if level == level_budget && violation.is_none() {
        SimplicityVerdict::ConsistentWithSimple
    } else {
        SimplicityVerdict::Inconclusive
    };
    Ok(SimplicityReport {
        characteristic,
        level_transitive_to: level,
        level_budget,
        effectiveness_violation: violation,
        witness,
        verdict,
    })
}

/// Brute-force span check over `Z/tZ` for small parameters: enumerate all
/// linear combinations. Used as an oracle in tests.
pub fn span_full_bruteforce(patterns: &[&[usize]], n: usize, t: u64) -> bool {
    assert!(t >= 2 && n <= 8);
    let rows: Vec<Vec<u64>> = patterns
        .iter()
        .map(|idx| {
            let mut row = vec![0u64; n];
            for &i in idx.iter() {
                row[i] = 1;
            }
            row
        })
        .collect();
    let mut span = std::collections::HashSet::new();
    let mut coeffs = vec![0u64; rows.len()];
    loop {
        let mut v = vec![0u64; n];
        for (c, row) in coeffs.iter().zip(rows.iter()) {
            for k in 0..n {
                v[k] = (v[k] + c * row[k]) % t;
            }
        }
        span.insert(v);
        // Advance the coefficient vector in base t.
        let mut pos = 0;
        loop {
            if pos == coeffs.len() {
                let total = (t as u128).pow(n as u32);
                return span.len() as u128 == total;
            }
            coeffs[pos] += 1;
            if coeffs[pos] < t {
                break;
            }
            coeffs[pos] = 0;
            pos += 1;
        }
    }
}

/// The canonical scalar form of a kernel entry.
pub fn kernel_scalar(ring: Ring, x: i64) -> Scalar {
    ring.from_integer(x)
}
