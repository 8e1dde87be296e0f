//! The Steinberg algebra of the germ groupoid over `Q` or `Z/tZ`: formal
//! linear combinations of cells with convolution, involution, evaluation at
//! germs, support analysis, singular-ideal membership, decomposition along a
//! cover, and evaluation at points of the Hausdorff cover.

use std::fmt;

use num_rational::Ratio;

use crate::automaton::Automaton;
use crate::element::{act_word, section, GroupElement};
use crate::error::{AlgebraError, BudgetExceeded};
use crate::groupoid::{germ_equal, Cell, CoverPoint, Germ};
use crate::nucleus::Nucleus;
use crate::regset::{Region, RegionExpr};
use crate::word::{EvPeriodicWord, FiniteWord};

/// Exact rational with machine-word numerator and denominator; coefficients
/// in this toolkit stay tiny.
pub type Rational = Ratio<i64>;

/// The coefficient ring: the rationals, or the integers mod `t` for `t >= 2`.
/// In `Q` every nonzero element has additive order 0; in `Z/tZ` orders
/// divide `t`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Ring {
    Q,
    Zmod(u64),
}

impl Ring {
    /// The `t` parameter of the ring: 0 for `Q`, the modulus otherwise.
    pub fn t(&self) -> u64 {
        match self {
            Ring::Q => 0,
            Ring::Zmod(t) => *t,
        }
    }

    pub fn from_t(t: u64) -> Ring {
        if t == 0 {
            Ring::Q
        } else {
            assert!(t >= 2, "Z/tZ needs t >= 2");
            Ring::Zmod(t)
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_integer(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_integer(1)
    }

    pub fn from_integer(&self, n: i64) -> Scalar {
        match self {
            Ring::Q => Scalar::Q(Rational::from_integer(n)),
            Ring::Zmod(t) => Scalar::Mod(n.rem_euclid(*t as i64) as u64),
        }
    }

    pub fn from_rational(&self, r: Rational) -> Result<Scalar, AlgebraError> {
        match self {
            Ring::Q => Ok(Scalar::Q(r)),
            Ring::Zmod(_) => {
                if r.is_integer() {
                    Ok(self.from_integer(r.to_integer()))
                } else {
                    Err(AlgebraError::RingMismatch(
                        format!("{}", r),
                        self.to_string(),
                    ))
                }
            }
        }
    }

    fn check(&self, s: &Scalar) -> Result<(), AlgebraError> {
        let ok = matches!(
            (self, s),
            (Ring::Q, Scalar::Q(_)) | (Ring::Zmod(_), Scalar::Mod(_))
        );
        if ok {
            Ok(())
        } else {
            Err(AlgebraError::RingMismatch(s.to_string(), self.to_string()))
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Result<Scalar, AlgebraError> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (self, a, b) {
            (Ring::Q, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x + y),
            (Ring::Zmod(t), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x + y) % t),
            _ => unreachable!(),
        })
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Result<Scalar, AlgebraError> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (self, a, b) {
            (Ring::Q, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x * y),
            (Ring::Zmod(t), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x * y) % t),
            _ => unreachable!(),
        })
    }

    pub fn neg(&self, a: &Scalar) -> Result<Scalar, AlgebraError> {
        self.check(a)?;
        Ok(match (self, a) {
            (Ring::Q, Scalar::Q(x)) => Scalar::Q(-x),
            (Ring::Zmod(t), Scalar::Mod(x)) => Scalar::Mod((t - x) % t),
            _ => unreachable!(),
        })
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Q => write!(f, "Q"),
            Ring::Zmod(t) => write!(f, "Z/{}", t),
        }
    }
}

/// An exact ring value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Scalar {
    Q(Rational),
    Mod(u64),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(x) => *x == Rational::from_integer(0),
            Scalar::Mod(x) => *x == 0,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(x) => write!(f, "{}", x),
            Scalar::Mod(x) => write!(f, "{}", x),
        }
    }
}

/// A formal R-linear combination of cells: the computational representation
/// of the Steinberg algebra. The semantic function on the groupoid sends a
/// germ to the sum of the coefficients of the cells containing it. No global
/// canonical form is maintained; equality is semantic.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    pub ring: Ring,
    pub terms: Vec<(Scalar, Cell)>,
}

impl AlgebraElement {
    pub fn zero(ring: Ring) -> Self {
        AlgebraElement {
            ring,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(ring: Ring, terms: Vec<(Scalar, Cell)>) -> Result<Self, AlgebraError> {
        for (c, _) in &terms {
            ring.check(c)?;
        }
        Ok(normalize(AlgebraElement { ring, terms }))
    }

    /// The indicator of a single cell.
    pub fn indicator(ring: Ring, cell: Cell) -> Self {
        AlgebraElement {
            ring,
            terms: vec![(ring.one(), cell)],
        }
    }
}

/// Drop zero-coefficient terms and merge structurally identical cells. The
/// semantic function is unchanged.
pub fn normalize(f: AlgebraElement) -> AlgebraElement {
    let ring = f.ring;
    let mut terms: Vec<(Scalar, Cell)> = Vec::new();
    for (c, cell) in f.terms {
        if cell.is_empty() {
            continue;
        }
        match terms.iter_mut().find(|(_, k)| *k == cell) {
            Some((acc, _)) => {
                *acc = ring.add(acc, &c).expect("ring checked at construction");
            }
            None => terms.push((c, cell)),
        }
    }
    terms.retain(|(c, _)| !c.is_zero());
    AlgebraElement { ring, terms }
}

/// Pointwise sum.
pub fn add(f: &AlgebraElement, g: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
    if f.ring != g.ring {
        return Err(AlgebraError::RingMismatch(
            f.ring.to_string(),
            g.ring.to_string(),
        ));
    }
    let mut terms = f.terms.clone();
    terms.extend(g.terms.iter().cloned());
    Ok(normalize(AlgebraElement {
        ring: f.ring,
        terms,
    }))
}

/// Scalar multiple.
pub fn scale(c: &Scalar, f: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
    f.ring.check(c)?;
    let terms = f
        .terms
        .iter()
        .map(|(a, cell)| Ok((f.ring.mul(c, a)?, cell.clone())))
        .collect::<Result<Vec<_>, AlgebraError>>()?;
    Ok(normalize(AlgebraElement {
        ring: f.ring,
        terms,
    }))
}

/// Convolution: the bilinear extension of cell composition. For indicator
/// functions of bisections `1_U * 1_V = 1_{UV}`, and the result's semantic
/// function satisfies the convolution formula at every germ.
pub fn convolve(
    aut: &Automaton,
    f: &AlgebraElement,
    g: &AlgebraElement,
) -> Result<AlgebraElement, AlgebraError> {
    if f.ring != g.ring {
        return Err(AlgebraError::RingMismatch(
            f.ring.to_string(),
            g.ring.to_string(),
        ));
    }
    let mut terms = Vec::new();
    for (a, c1) in &f.terms {
        for (b, c2) in &g.terms {
            let coeff = f.ring.mul(a, b)?;
            for cell in crate::groupoid::compose_cells(aut, c1, c2).cells {
                terms.push((coeff.clone(), cell));
            }
        }
    }
    Ok(normalize(AlgebraElement {
        ring: f.ring,
        terms,
    }))
}

/// Involution `f*(g) = f(g^{-1})` (coefficients are conjugation-free in `Q`
/// and `Z/tZ`): invert every cell.
pub fn involute(aut: &Automaton, f: &AlgebraElement) -> AlgebraElement {
    normalize(AlgebraElement {
        ring: f.ring,
        terms: f
            .terms
            .iter()
            .map(|(c, cell)| (c.clone(), crate::groupoid::invert_cell(aut, cell)))
            .collect(),
    })
}

/// The value of `f` at a germ: the sum of the coefficients of the cells
/// whose germ at the base point equals it.
pub fn evaluate(
    aut: &Automaton,
    f: &AlgebraElement,
    germ: &Germ,
) -> Result<Scalar, AlgebraError> {
    let mut acc = f.ring.zero();
    for (c, cell) in &f.terms {
        if let Some(cg) = cell.germ_at(&germ.base) {
            if germ_equal(aut, germ, &cg)? {
                acc = f.ring.add(&acc, c)?;
            }
        }
    }
    Ok(acc)
}

/// One class of the support partition: over the cylinder piece, the germs of
/// the block's terms coincide (and differ from the other applicable terms),
/// and `f` takes `value` on that common germ.
#[derive(Clone, Debug)]
pub struct SupportClass {
    /// Cylinder piece of the source space.
    pub piece: FiniteWord,
    /// Indices into `f.terms` whose germs coincide on this class.
    pub block: Vec<usize>,
    /// The full coincidence pattern the class belongs to.
    pub partition: Vec<Vec<usize>>,
    /// Summed coefficient of the block.
    pub value: Scalar,
    /// A point of the class region.
    pub sample: EvPeriodicWord,
    /// Whether the class region has empty interior.
    pub empty_interior: bool,
}

/// A term localized at a cylinder piece.
struct LocalTerm {
    index: usize,
    u_loc: FiniteWord,
    g_loc: GroupElement,
}

/// Cylinder pieces refining all the given source-cylinder words: each piece
/// is comparable (contained or disjoint) with every input cylinder and the
/// pieces cover their union.
fn arrangement_pieces(aut: &Automaton, sources: &[FiniteWord]) -> Vec<FiniteWord> {
    fn split(aut: &Automaton, p: FiniteWord, sources: &[FiniteWord], out: &mut Vec<FiniteWord>) {
        if sources.iter().any(|s| p.is_prefix_of(s) && *s != p) {
            for x in aut.alphabet.letters() {
                let mut child = p.clone();
                child.push(x);
                split(aut, child, sources, out);
            }
        } else if sources.iter().any(|s| s.is_prefix_of(&p)) {
            out.push(p);
        }
    }
    let mut out = Vec::new();
    split(aut, FiniteWord::empty(), sources, &mut out);
    out
}

/// Terms of `f` applicable on the piece, localized.
fn localize_terms(aut: &Automaton, f: &AlgebraElement, piece: &FiniteWord) -> Vec<LocalTerm> {
    let mut out = Vec::new();
    for (i, (_, cell)) in f.terms.iter().enumerate() {
        if !cell.v.is_prefix_of(piece) {
            continue;
        }
        let z = FiniteWord(cell.v.strip_from(piece).unwrap().to_vec());
        // The piece is comparable with every source cylinder; applicable
        // means some W-cylinder is a prefix of z.
        if !cell.w.cylinders().iter().any(|c| c.is_prefix_of(&z)) {
            continue;
        }
        out.push(LocalTerm {
            index: i,
            u_loc: cell.u.concat(&act_word(aut, &cell.g, &z)),
            g_loc: section(aut, &cell.g, &z),
        });
    }
    out
}

/// Pairwise germ-comparison status of two localized terms over a piece.
#[derive(Clone, Debug)]
enum PairStatus {
    /// The germs can never coincide (different range legs or empty `TF`).
    Never,
    /// The germs coincide everywhere on the piece (trivial quotient).
    Always,
    /// Coincidence is governed by `TF` of the quotient.
    Maybe(GroupElement),
}

/// Set partitions of `{0, .., n-1}` in which every block is a clique of the
/// `allowed` relation, enumerated with pruning.
fn clique_partitions(n: usize, allowed: &dyn Fn(usize, usize) -> bool) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut current: Vec<Vec<usize>> = Vec::new();
    fn recurse(
        i: usize,
        n: usize,
        allowed: &dyn Fn(usize, usize) -> bool,
        current: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if i == n {
            out.push(current.clone());
            return;
        }
        for b in 0..current.len() {
            if current[b].iter().all(|&j| allowed(i, j)) {
                current[b].push(i);
                recurse(i + 1, n, allowed, current, out);
                current[b].pop();
            }
        }
        current.push(vec![i]);
        recurse(i + 1, n, allowed, current, out);
        current.pop();
    }
    recurse(0, n, allowed, &mut current, &mut out);
    out
}

const PARTITION_TERM_CAP: usize = 16;

/// Partition the source space under the coincidence pattern of the germs of
/// `f`'s cells, reporting, per realizable pattern and block, the summed
/// coefficient, a sample point, and whether the pattern region has empty
/// interior. The union of the classes with nonzero value is the source of
/// the strict support of `f`.
#[allow(clippy::needless_range_loop)]
pub fn support_partition(
    aut: &Automaton,
    f: &AlgebraElement,
) -> Result<Vec<SupportClass>, AlgebraError> {
    let mut cache = crate::regset::SfCache::new();
    let mut sources = Vec::new();
    for (_, cell) in &f.terms {
        for c in cell.w.cylinders() {
            sources.push(cell.v.concat(c));
        }
    }
    let mut classes = Vec::new();
    for piece in arrangement_pieces(aut, &sources) {
        let local = localize_terms(aut, f, &piece);
        if local.is_empty() {
            continue;
        }
        // Pairwise statuses, then contraction of the always-equal pairs.
        let n = local.len();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                if i == j || local[i].u_loc != local[j].u_loc {
                    row.push(PairStatus::Never);
                    continue;
                }
                let quot = GroupElement::multiply(aut, &local[j].g_loc.invert(), &local[i].g_loc);
                if crate::element::is_trivial(aut, &quot)? {
                    row.push(PairStatus::Always);
                } else {
                    let sf = cache.get_or_build(aut, &quot)?;
                    if matches!(sf.normalized_initial(), crate::regset::SfTarget::Dead) {
                        row.push(PairStatus::Never);
                    } else {
                        row.push(PairStatus::Maybe(quot));
                    }
                }
            }
            rows.push(row);
        }
        // Union-find over Always pairs.
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        for i in 0..n {
            for j in i + 1..n {
                if matches!(rows[i][j], PairStatus::Always) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        let mut node_of: Vec<usize> = vec![usize::MAX; n];
        let mut nodes: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            match nodes.iter().position(|g: &Vec<usize>| find(&mut parent, g[0]) == r) {
                Some(k) => {
                    nodes[k].push(i);
                    node_of[i] = k;
                }
                None => {
                    node_of[i] = nodes.len();
                    nodes.push(vec![i]);
                }
            }
        }
        let m = nodes.len();
        if m > PARTITION_TERM_CAP {
            return Err(AlgebraError::Budget(BudgetExceeded {
                context: "support_partition",
                detail: format!("{} germ-distinct terms on one piece", m),
            }));
        }
        // Representative-level statuses.
        let node_status = |a: usize, b: usize| -> &PairStatus { &rows[nodes[a][0]][nodes[b][0]] };
        let allowed =
            |a: usize, b: usize| -> bool { matches!(node_status(a, b), PairStatus::Maybe(_)) };

        for partition in clique_partitions(m, &allowed) {
            let mut parts = Vec::new();
            for b in &partition {
                for (pos, &i) in b.iter().enumerate() {
                    for &j in &b[pos + 1..] {
                        if let PairStatus::Maybe(q) = node_status(i, j) {
                            parts.push(RegionExpr::Tf(q.clone()));
                        }
                    }
                }
            }
            for (bi, b) in partition.iter().enumerate() {
                for b2 in &partition[bi + 1..] {
                    for &i in b {
                        for &j in b2 {
                            if let PairStatus::Maybe(q) = node_status(i, j) {
                                parts.push(RegionExpr::Tf(q.clone()).complement());
                            }
                        }
                    }
                }
            }
            let region = Region::compile_cached(aut, &RegionExpr::inter(parts), &mut cache)?;
            let Some(tail_sample) = region.nonempty() else {
                continue;
            };
            let empty_interior = region.empty_interior();
            let sample = tail_sample.with_prefix(&piece);
            let index_partition: Vec<Vec<usize>> = partition
                .iter()
                .map(|b| {
                    b.iter()
                        .flat_map(|&k| nodes[k].iter().map(|&i| local[i].index))
                        .collect()
                })
                .collect();
            for b in &index_partition {
                let mut value = f.ring.zero();
                for &i in b {
                    value = f.ring.add(&value, &f.terms[i].0)?;
                }
                classes.push(SupportClass {
                    piece: piece.clone(),
                    block: b.clone(),
                    partition: index_partition.clone(),
                    value,
                    sample: sample.clone(),
                    empty_interior,
                });
            }
        }
    }
    Ok(classes)
}

/// Whether `f` is semantically zero: no realizable class carries a nonzero
/// value.
pub fn is_zero(aut: &Automaton, f: &AlgebraElement) -> Result<bool, AlgebraError> {
    Ok(support_partition(aut, f)?
        .iter()
        .all(|c| c.value.is_zero()))
}

/// Semantic equality.
pub fn equal(
    aut: &Automaton,
    f: &AlgebraElement,
    g: &AlgebraElement,
) -> Result<bool, AlgebraError> {
    let minus_one = f.ring.neg(&f.ring.one())?;
    is_zero(aut, &add(f, &scale(&minus_one, g)?)?)
}

/// Singular-ideal membership: the source of the strict support has empty
/// interior, i.e. every realizable class with nonzero value sits on a
/// region with empty interior.
pub fn is_singular(aut: &Automaton, f: &AlgebraElement) -> Result<bool, AlgebraError> {
    Ok(support_partition(aut, f)?
        .iter()
        .all(|c| c.value.is_zero() || c.empty_interior))
}

/// The sum of `f` over the member germs of a cover point.
pub fn evaluate_cover(
    aut: &Automaton,
    nuc: &Nucleus,
    f: &AlgebraElement,
    point: &CoverPoint,
) -> Result<Scalar, AlgebraError> {
    let prefix = point.base.prefix(point.depth);
    let mut acc = f.ring.zero();
    for &m in &point.members {
        let germ = Germ {
            base: point.base.clone(),
            u: prefix.clone(),
            g: nuc.element(m).clone(),
            v: prefix.clone(),
        };
        acc = f.ring.add(&acc, &evaluate(aut, f, &germ)?)?;
    }
    Ok(acc)
}

const DECOMPOSE_DEPTH_CAP: usize = 24;

/// Decompose `f` as a sum of parts, each supported in one cover cell
/// (verifying first that the strict support is contained in the union).
/// Greedy peeling: on each piece where the value of `f` along the branch of
/// cover cell `k` is constant outside the later covers, that value is
/// assigned to part `k`; finer pieces are split off as needed.
pub fn decompose(
    aut: &Automaton,
    f: &AlgebraElement,
    covers: &[Cell],
) -> Result<Vec<AlgebraElement>, AlgebraError> {
    // Containment check: every nonzero class germ lies in some cover cell.
    for class in support_partition(aut, f)? {
        if class.value.is_zero() {
            continue;
        }
        let i = class.block[0];
        let cell = &f.terms[i].1;
        let germ = cell
            .germ_at(&class.sample)
            .expect("class sample lies in the source of its block");
        let mut covered = false;
        for cov in covers {
            if let Some(cg) = cov.germ_at(&class.sample) {
                if germ_equal(aut, &germ, &cg)? {
                    covered = true;
                    break;
                }
            }
        }
        if !covered {
            return Err(AlgebraError::CoverInsufficient);
        }
    }

    let mut remaining = f.clone();
    let mut parts = Vec::new();
    for (k, cover) in covers.iter().enumerate() {
        let later = &covers[k + 1..];
        let mut part_terms: Vec<(Scalar, Cell)> = Vec::new();
        for root in cover.w.cylinders() {
            let start = cover.v.concat(root);
            peel_branch(
                aut,
                &remaining,
                cover,
                later,
                start,
                0,
                &mut part_terms,
            )?;
        }
        let part = AlgebraElement::from_terms(f.ring, part_terms)?;
        let minus_one = f.ring.neg(&f.ring.one())?;
        remaining = add(&remaining, &scale(&minus_one, &part)?)?;
        parts.push(part);
    }
    if !is_zero(aut, &remaining)? {
        return Err(AlgebraError::CoverInsufficient);
    }
    Ok(parts)
}

/// Recursive step of the peeling: on the cylinder `w` (inside the source of
/// `cover`), determine the value of `remaining` along the cover's branch
/// outside the later covers; emit a subcell when it is constant, split
/// deeper otherwise.
fn peel_branch(
    aut: &Automaton,
    remaining: &AlgebraElement,
    cover: &Cell,
    later: &[Cell],
    w: FiniteWord,
    depth: usize,
    out: &mut Vec<(Scalar, Cell)>,
) -> Result<(), AlgebraError> {
    if depth > DECOMPOSE_DEPTH_CAP {
        return Err(AlgebraError::Budget(BudgetExceeded {
            context: "decompose",
            detail: "peeling depth cap reached".to_string(),
        }));
    }
    // Split until every relevant source leg is at or above w, so that all
    // cells localize at w.
    let needs_split = remaining
        .terms
        .iter()
        .map(|(_, c)| c)
        .chain(later.iter())
        .any(|c| w.is_prefix_of(&c.v) && c.v != w);
    if needs_split {
        for x in aut.alphabet.letters() {
            let mut child = w.clone();
            child.push(x);
            peel_branch(aut, remaining, cover, later, child, depth + 1, out)?;
        }
        return Ok(());
    }
    // Localize the cover's branch at w.
    let z = FiniteWord(cover.v.strip_from(&w).expect("w inside source").to_vec());
    let u_cov = cover.u.concat(&act_word(aut, &cover.g, &z));
    let g_cov = section(aut, &cover.g, &z);

    // Match regions (relative to tails after w) of the remaining terms
    // against the branch.
    let mut match_regions: Vec<(usize, RegionExpr)> = Vec::new();
    for (i, (_, cell)) in remaining.terms.iter().enumerate() {
        if let Some(expr) = germ_match_region(aut, cell, &w, &u_cov, &g_cov) {
            match_regions.push((i, expr));
        }
    }
    // Later covers' match regions: where the branch germ also lies in a
    // later cover, the value is owed to that cover instead.
    let mut later_regions: Vec<RegionExpr> = Vec::new();
    for cov in later {
        if let Some(expr) = germ_match_region(aut, cov, &w, &u_cov, &g_cov) {
            later_regions.push(expr);
        }
    }
    let outside_later = if later_regions.is_empty() {
        RegionExpr::Full
    } else {
        RegionExpr::union(later_regions).complement()
    };

    // The region still owed to this cover.
    if Region::compile(aut, &outside_later)?.nonempty().is_none() {
        return Ok(());
    }

    // Realizable match subsets and their values on the owed region.
    let mut values: Vec<(Scalar, EvPeriodicWord)> = Vec::new();
    let mut distinct = std::collections::BTreeSet::new();
    for mask in 0..(1usize << match_regions.len()) {
        let mut parts = vec![outside_later.clone()];
        for (pos, (_, expr)) in match_regions.iter().enumerate() {
            if mask & (1 << pos) != 0 {
                parts.push(expr.clone());
            } else {
                parts.push(expr.clone().complement());
            }
        }
        if let Some(sample) = Region::compile(aut, &RegionExpr::inter(parts))?.nonempty() {
            let mut v = remaining.ring.zero();
            for (pos, (i, _)) in match_regions.iter().enumerate() {
                if mask & (1 << pos) != 0 {
                    v = remaining.ring.add(&v, &remaining.terms[*i].0)?;
                }
            }
            distinct.insert(format!("{}", v));
            values.push((v, sample));
        }
    }
    match distinct.len() {
        0 => Ok(()),
        1 => {
            let v = values.pop().unwrap().0;
            if !v.is_zero() {
                out.push((
                    v,
                    Cell {
                        u: u_cov,
                        g: g_cov,
                        v: w,
                        w: crate::groupoid::Clopen::full(),
                    },
                ));
            }
            Ok(())
        }
        _ => {
            for x in aut.alphabet.letters() {
                let mut child = w.clone();
                child.push(x);
                peel_branch(aut, remaining, cover, later, child, depth + 1, out)?;
            }
            Ok(())
        }
    }
}

/// The region (relative to tails after `w`) where the germ of `cell` equals
/// the germ of the branch `(u_b, g_b)` over `wX`; `None` when the cell
/// cannot match anywhere over `w`. Requires the cell's source leg to be at
/// or above `w` (the peeling splits cylinders until that holds).
fn germ_match_region(
    aut: &Automaton,
    cell: &Cell,
    w: &FiniteWord,
    u_b: &FiniteWord,
    g_b: &GroupElement,
) -> Option<RegionExpr> {
    debug_assert!(cell.v.is_prefix_of(w) || !w.is_prefix_of(&cell.v));
    if !cell.v.is_prefix_of(w) {
        return None;
    }
    let z = FiniteWord(cell.v.strip_from(w).unwrap().to_vec());
    let wq = cell.w.strip_prefix(aut.alphabet.size, &z);
    if wq.is_empty() {
        return None;
    }
    let u_loc = cell.u.concat(&act_word(aut, &cell.g, &z));
    if u_loc != *u_b {
        return None;
    }
    let g_loc = section(aut, &cell.g, &z);
    let quot = GroupElement::multiply(aut, &g_loc.invert(), g_b);
    Some(RegionExpr::inter(vec![wq.region(), RegionExpr::Tf(quot)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::Clopen;
    use crate::samples;

    fn elem(aut: &Automaton, s: &str) -> GroupElement {
        GroupElement::parse(aut, s).unwrap()
    }

    fn pt(s: &str) -> EvPeriodicWord {
        EvPeriodicWord::parse(s).unwrap()
    }

    fn indicator_sum(ring: Ring, aut: &Automaton, names: &[&str]) -> AlgebraElement {
        AlgebraElement::from_terms(
            ring,
            names
                .iter()
                .map(|n| (ring.one(), Cell::of_element(elem(aut, n))))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn normalization_and_scaling() {
        let aut = samples::grigorchuk();
        let cell = Cell::of_element(elem(&aut, "b"));
        let ring = Ring::Q;
        let one = ring.one();
        let minus_one = ring.neg(&one).unwrap();
        let f = AlgebraElement::from_terms(
            ring,
            vec![(one.clone(), cell.clone()), (minus_one, cell.clone())],
        )
        .unwrap();
        assert!(f.terms.is_empty());

        let z4 = Ring::Zmod(4);
        let two = z4.from_integer(2);
        let g = AlgebraElement::from_terms(z4, vec![(z4.one(), cell.clone())]).unwrap();
        let scaled = scale(&two, &g).unwrap();
        assert_eq!(scaled.terms[0].0, two);
        // 2 * 2 = 0 mod 4.
        let twice = AlgebraElement::from_terms(z4, vec![(two.clone(), cell)]).unwrap();
        assert!(scale(&two, &twice).unwrap().terms.is_empty());
    }

    #[test]
    fn ring_mismatch_is_detected() {
        let aut = samples::grigorchuk();
        let cell = Cell::of_element(elem(&aut, "b"));
        let f = AlgebraElement::indicator(Ring::Q, cell.clone());
        let g = AlgebraElement::indicator(Ring::Zmod(2), cell);
        assert!(matches!(add(&f, &g), Err(AlgebraError::RingMismatch(..))));
        assert!(matches!(
            convolve(&aut, &f, &g),
            Err(AlgebraError::RingMismatch(..))
        ));
        assert!(matches!(
            scale(&Scalar::Mod(1), &f),
            Err(AlgebraError::RingMismatch(..))
        ));
    }

    #[test]
    fn convolution_of_single_cells() {
        let aut = samples::grigorchuk();
        let f = AlgebraElement::indicator(Ring::Q, Cell::of_element(elem(&aut, "b")));
        let g = AlgebraElement::indicator(Ring::Q, Cell::of_element(elem(&aut, "c")));
        let fg = convolve(&aut, &f, &g).unwrap();
        assert_eq!(fg.terms.len(), 1);
        assert_eq!(fg.terms[0].1.g, elem(&aut, "b.c"));

        // A unit cell acts as a local identity: restriction to its source.
        let unit0 = AlgebraElement::indicator(
            Ring::Q,
            Cell::unit(FiniteWord::from_letters(&[0])),
        );
        let restricted = convolve(&aut, &unit0, &f).unwrap();
        // The germ of b at a point of 0X survives, elsewhere nothing.
        let inside = Germ::of_element(elem(&aut, "b"), pt("0(0)"));
        assert_eq!(
            evaluate(&aut, &restricted, &inside).unwrap(),
            Ring::Q.one()
        );
        let outside = Germ::of_element(elem(&aut, "b"), pt("(1)"));
        assert!(evaluate(&aut, &restricted, &outside).unwrap().is_zero());
    }

    #[test]
    fn involution_examples() {
        let aut = samples::grigorchuk();
        let c = Cell {
            u: FiniteWord::from_letters(&[0]),
            g: elem(&aut, "a"),
            v: FiniteWord::from_letters(&[1]),
            w: Clopen::full(),
        };
        let f = AlgebraElement::indicator(Ring::Q, c);
        let fi = involute(&aut, &f);
        assert_eq!(fi.terms[0].1.u, FiniteWord::from_letters(&[1]));
        assert_eq!(fi.terms[0].1.g, elem(&aut, "a'"));
        let fii = involute(&aut, &fi);
        assert!(equal(&aut, &fii, &f).unwrap());

        // The mod-2 witness is involutive: b, c, d are involutions over
        // symmetric legs.
        let w = indicator_sum(Ring::Zmod(2), &aut, &["e", "b", "c", "d"]);
        let wi = involute(&aut, &w);
        assert!(equal(&aut, &wi, &w).unwrap());
    }

    #[test]
    fn evaluation_counts_coinciding_germs() {
        let aut = samples::grigorchuk();
        let f = indicator_sum(Ring::Q, &aut, &["b", "c"]);
        // Germs of b and c coincide at 0(0) since 0(0) lies in TF_d.
        let germ = Germ::of_element(elem(&aut, "b"), pt("0(0)"));
        assert_eq!(
            evaluate(&aut, &f, &germ).unwrap(),
            Scalar::Q(Rational::from_integer(2))
        );
        // Outside all cells the value is zero.
        let far = Germ::of_element(elem(&aut, "a"), pt("(0)"));
        assert!(evaluate(&aut, &f, &far).unwrap().is_zero());
        // Over F_2 the coinciding germs cancel.
        let f2 = indicator_sum(Ring::Zmod(2), &aut, &["e", "b", "c", "d"]);
        let germ_b = Germ::of_element(elem(&aut, "b"), pt("0(0)"));
        assert!(evaluate(&aut, &f2, &germ_b).unwrap().is_zero());
    }

    #[test]
    fn support_partition_of_unit_minus_b() {
        let aut = samples::grigorchuk();
        let ring = Ring::Q;
        let f = AlgebraElement::from_terms(
            ring,
            vec![
                (ring.one(), Cell::of_element(GroupElement::identity())),
                (
                    ring.neg(&ring.one()).unwrap(),
                    Cell::of_element(elem(&aut, "b")),
                ),
            ],
        )
        .unwrap();
        let classes = support_partition(&aut, &f).unwrap();
        // On TF_b the two germs coincide with value 0; elsewhere separate
        // germs carry +1 and -1.
        let mut joint = classes
            .iter()
            .filter(|c| c.block.len() == 2)
            .collect::<Vec<_>>();
        assert_eq!(joint.len(), 1);
        assert!(joint.pop().unwrap().value.is_zero());
        let separate: Vec<_> = classes.iter().filter(|c| c.block.len() == 1).collect();
        assert_eq!(separate.len(), 2);
        assert!(separate.iter().all(|c| !c.value.is_zero()));
        assert!(!is_singular(&aut, &f).unwrap());
        assert!(!is_zero(&aut, &f).unwrap());
    }

    #[test]
    fn zero_element_has_empty_support() {
        let aut = samples::grigorchuk();
        let f = AlgebraElement::zero(Ring::Q);
        assert!(support_partition(&aut, &f).unwrap().is_empty());
        assert!(is_zero(&aut, &f).unwrap());
        // The zero element is vacuously singular.
        assert!(is_singular(&aut, &f).unwrap());
    }

    #[test]
    fn erschler_rational_witness_is_singular() {
        let aut = samples::grigorchuk_erschler();
        let ring = Ring::Q;
        let minus_one = ring.neg(&ring.one()).unwrap();
        let f = AlgebraElement::from_terms(
            ring,
            vec![
                (ring.one(), Cell::of_element(GroupElement::identity())),
                (minus_one.clone(), Cell::of_element(elem(&aut, "alpha"))),
                (minus_one, Cell::of_element(elem(&aut, "beta"))),
                (ring.one(), Cell::of_element(elem(&aut, "gamma"))),
            ],
        )
        .unwrap();
        assert!(is_singular(&aut, &f).unwrap());
        assert!(!is_zero(&aut, &f).unwrap());
        // All nonzero value lives over the tail 1^∞.
        for class in support_partition(&aut, &f).unwrap() {
            if !class.value.is_zero() {
                assert!(class.empty_interior);
                // The sample point has a tail of ones.
                let s = &class.sample;
                assert_eq!(s.period(), &[1]);
            }
        }
    }

    #[test]
    fn grigorchuk_mod2_witness_is_singular() {
        let aut = samples::grigorchuk();
        let f = indicator_sum(Ring::Zmod(2), &aut, &["e", "b", "c", "d"]);
        assert!(is_singular(&aut, &f).unwrap());
        assert!(!is_zero(&aut, &f).unwrap());
        // Not singular over Q: the six coincidence patterns cancel only
        // mod 2.
        let fq = indicator_sum(Ring::Q, &aut, &["e", "b", "c", "d"]);
        assert!(!is_singular(&aut, &fq).unwrap());
        // The unit cell is not singular either.
        let unit = AlgebraElement::indicator(
            Ring::Q,
            Cell::of_element(GroupElement::identity()),
        );
        assert!(!is_singular(&aut, &unit).unwrap());
    }

    #[test]
    fn decompose_round_trips() {
        let aut = samples::grigorchuk();
        let ring = Ring::Q;
        // f = 1_{U_d} with cover {U_d}.
        let d_cell = Cell::of_element(elem(&aut, "d"));
        let f = AlgebraElement::indicator(ring, d_cell.clone());
        let parts = decompose(&aut, &f, std::slice::from_ref(&d_cell)).unwrap();
        assert_eq!(parts.len(), 1);
        assert!(equal(&aut, &parts[0], &f).unwrap());

        // f = 1_{U_b} + 1_{U_c} with cover {U_b, U_c}.
        let f = indicator_sum(ring, &aut, &["b", "c"]);
        let covers = [
            Cell::of_element(elem(&aut, "b")),
            Cell::of_element(elem(&aut, "c")),
        ];
        let parts = decompose(&aut, &f, &covers).unwrap();
        assert_eq!(parts.len(), 2);
        let sum = add(&parts[0], &parts[1]).unwrap();
        assert!(equal(&aut, &sum, &f).unwrap());
        // Each part is supported in its cover cell.
        for (part, cover) in parts.iter().zip(covers.iter()) {
            for class in support_partition(&aut, part).unwrap() {
                if class.value.is_zero() {
                    continue;
                }
                let i = class.block[0];
                let germ = part.terms[i].1.germ_at(&class.sample).unwrap();
                let cg = cover.germ_at(&class.sample).unwrap();
                assert!(germ_equal(&aut, &germ, &cg).unwrap());
            }
        }
    }

    #[test]
    fn decompose_rejects_insufficient_cover() {
        let aut = samples::grigorchuk();
        let f = indicator_sum(Ring::Q, &aut, &["b", "c"]);
        let covers = [Cell::of_element(elem(&aut, "b"))];
        assert!(matches!(
            decompose(&aut, &f, &covers),
            Err(AlgebraError::CoverInsufficient)
        ));
    }

    #[test]
    fn evaluate_cover_on_grigorchuk_fiber() {
        let aut = samples::grigorchuk();
        let nuc = crate::nucleus::compute_nucleus(&aut, &crate::nucleus::NucleusBudget::default())
            .unwrap()
            .certificate()
            .unwrap()
            .nucleus;
        let f2 = indicator_sum(Ring::Zmod(2), &aut, &["e", "b", "c", "d"]);
        let points = crate::groupoid::fiber(&aut, &nuc, &pt("(1)")).unwrap();
        for p in &points {
            let v = evaluate_cover(&aut, &nuc, &f2, p).unwrap();
            if p.members.len() == 2 {
                // 1 + 1 = 0 in F_2 on the two-germ cover points.
                assert!(v.is_zero());
            } else {
                assert_eq!(v, Ring::Zmod(2).one());
            }
        }
        // Non-dangerous singleton: evaluate_cover is evaluation at the unit.
        let tame = crate::groupoid::fiber(&aut, &nuc, &pt("0(01)")).unwrap();
        let v = evaluate_cover(&aut, &nuc, &f2, &tame[0]).unwrap();
        let unit = Germ::unit(pt("0(01)"));
        assert_eq!(v, evaluate(&aut, &f2, &unit).unwrap());
    }
}
