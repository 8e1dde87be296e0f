//! The acceptance suite over the bundled corpus: each criterion checks the
//! computed invariants against the known ground truth for the bundled
//! automata, within its stated time bound.

use std::path::Path;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use ssg_core::element::{act_word, is_trivial, Gen, GroupElement};
use ssg_core::groupoid::{
    d0_status, fiber, find_nonregular_witness, germ_equal, is_dangerous, member_names,
    regular_open, Cell, Clopen, D0Status, Germ, NonRegularOutcome,
};
use ssg_core::nucleus::{compute_nucleus, Nucleus, NucleusBudget};
use ssg_core::scond::{
    build_singular, search_witness, span_full, span_full_bruteforce, SearchBudget,
};
use ssg_core::steinberg::{
    add, convolve, decompose, equal, evaluate, evaluate_cover, involute, is_singular, is_zero,
    AlgebraElement, Ring,
};
use ssg_core::word::{EvPeriodicWord, FiniteWord, Letter};
use ssg_core::Automaton;

pub struct CriterionResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed_ms: u64,
}

struct Corpus {
    grigorchuk: Automaton,
    grigorchuk_erschler: Automaton,
    gupta_sidki3: Automaton,
    odometer: Automaton,
}

fn load(corpus: &str, name: &str) -> Result<Automaton, String> {
    let path = Path::new(corpus).join(name);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
    Automaton::parse(&text).map_err(|e| format!("{}: {}", name, e))
}

fn load_corpus(corpus: &str) -> Result<Corpus, String> {
    Ok(Corpus {
        grigorchuk: load(corpus, "grigorchuk.ssg")?,
        grigorchuk_erschler: load(corpus, "grigorchuk_erschler.ssg")?,
        gupta_sidki3: load(corpus, "gupta_sidki3.ssg")?,
        odometer: load(corpus, "odometer.ssg")?,
    })
}

fn nucleus_of(aut: &Automaton) -> Result<Nucleus, String> {
    compute_nucleus(aut, &NucleusBudget::default())
        .map_err(|e| e.to_string())?
        .certificate()
        .map(|c| c.nucleus)
        .ok_or_else(|| "nucleus inconclusive".to_string())
}

fn sorted_names(nuc: &Nucleus) -> Vec<String> {
    let mut names: Vec<String> = nuc.names.clone();
    names.sort();
    names
}

fn pt(s: &str) -> EvPeriodicWord {
    EvPeriodicWord::parse(s).unwrap()
}

type Check = fn(&Corpus) -> Result<String, String>;

fn criterion_1_nucleus(c: &Corpus) -> Result<String, String> {
    let grig = nucleus_of(&c.grigorchuk)?;
    if grig.len() != 5 || sorted_names(&grig) != ["a", "b", "c", "d", "e"] {
        return Err(format!("grigorchuk nucleus {:?}", sorted_names(&grig)));
    }
    let ge = nucleus_of(&c.grigorchuk_erschler)?;
    if ge.len() != 5 || sorted_names(&ge) != ["alpha", "beta", "e", "gamma", "h"] {
        return Err(format!("erschler nucleus {:?}", sorted_names(&ge)));
    }
    let odo = nucleus_of(&c.odometer)?;
    if odo.len() != 3 {
        return Err(format!("odometer nucleus size {}", odo.len()));
    }
    Ok("grigorchuk {e,a,b,c,d}; erschler {e,h,alpha,beta,gamma}; odometer 3 elements".to_string())
}

fn criterion_2_dangerous(c: &Corpus) -> Result<String, String> {
    let nuc = nucleus_of(&c.grigorchuk)?;
    let (dangerous, witnesses) =
        is_dangerous(&c.grigorchuk, &nuc, &pt("(1)")).map_err(|e| e.to_string())?;
    let mut names: Vec<&str> = witnesses
        .iter()
        .filter(|w| w.depth == 0)
        .map(|w| nuc.name(w.member))
        .collect();
    names.sort();
    if !dangerous || names != ["b", "c", "d"] {
        return Err(format!("grigorchuk (1): dangerous={} {:?}", dangerous, names));
    }
    let (dangerous, _) =
        is_dangerous(&c.grigorchuk, &nuc, &pt("0(01)")).map_err(|e| e.to_string())?;
    if dangerous {
        return Err("grigorchuk 0(01) flagged dangerous".to_string());
    }
    // Odometer: 50 sampled eventually periodic words, none dangerous.
    let onuc = nucleus_of(&c.odometer)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x0D0E);
    for _ in 0..50 {
        let pre: Vec<Letter> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..2)).collect();
        let per: Vec<Letter> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..2)).collect();
        let omega = EvPeriodicWord::new(&pre, &per);
        let (dangerous, _) =
            is_dangerous(&c.odometer, &onuc, &omega).map_err(|e| e.to_string())?;
        if dangerous {
            return Err(format!("odometer point {} flagged dangerous", omega));
        }
    }
    Ok("grigorchuk D = tails of 1^∞ with witnesses {b,c,d}; odometer Hausdorff on 50 samples"
        .to_string())
}

fn criterion_3_fibers(c: &Corpus) -> Result<String, String> {
    let nuc = nucleus_of(&c.grigorchuk)?;
    let points = fiber(&c.grigorchuk, &nuc, &pt("(1)")).map_err(|e| e.to_string())?;
    let mut sets: Vec<Vec<String>> = points.iter().map(|p| member_names(&nuc, &p.members)).collect();
    sets.sort();
    let expected: Vec<Vec<String>> = vec![
        vec!["e".into()],
        vec!["e".into(), "b".into()],
        vec!["e".into(), "c".into()],
        vec!["e".into(), "d".into()],
    ];
    if sets != expected {
        return Err(format!("grigorchuk fiber {:?}", sets));
    }
    // Realizing phases: the sample entering at depth l has its first zero
    // at a position ≡ 0 (d), 1 (c), 2 (b) mod 3.
    let star = |name: &str| match name {
        "d" => 0usize,
        "c" => 1,
        "b" => 2,
        _ => usize::MAX,
    };
    for p in &points {
        if p.members.len() != 2 {
            if p.members.len() > nuc.len() {
                return Err("fiber member count exceeds nucleus size".to_string());
            }
            continue;
        }
        let name = nuc.name(p.members[1]);
        for pat in &p.patterns {
            let first_zero = (0..64)
                .find(|&i| pat.sample_tail.letter_at(i) == 0)
                .ok_or("realizing sample without zero")?;
            if (pat.depth + first_zero) % 3 != star(name) {
                return Err(format!(
                    "phase pattern violated for {} at depth {}",
                    name, pat.depth
                ));
            }
        }
    }
    let genuc = nucleus_of(&c.grigorchuk_erschler)?;
    let gp = fiber(&c.grigorchuk_erschler, &genuc, &pt("(1)")).map_err(|e| e.to_string())?;
    let mut gsets: Vec<Vec<String>> = gp.iter().map(|p| member_names(&genuc, &p.members)).collect();
    gsets.sort();
    let gexpected: Vec<Vec<String>> = vec![
        vec!["e".into()],
        vec!["e".into(), "alpha".into()],
        vec!["e".into(), "beta".into()],
    ];
    if gsets != gexpected {
        return Err(format!("erschler fiber {:?}", gsets));
    }
    let gstar = |name: &str| match name {
        "alpha" => 0usize,
        "beta" => 1,
        _ => usize::MAX,
    };
    for p in &gp {
        if p.members.len() != 2 {
            continue;
        }
        let name = genuc.name(p.members[1]);
        for pat in &p.patterns {
            let first_zero = (0..64)
                .find(|&i| pat.sample_tail.letter_at(i) == 0)
                .ok_or("realizing sample without zero")?;
            if (pat.depth + first_zero) % 2 != gstar(name) {
                return Err(format!("erschler phase pattern violated for {}", name));
            }
        }
    }
    Ok("grigorchuk fiber = {e},{e,b},{e,c},{e,d} with mod-3 phases; erschler = {e},{e,α},{e,β} with mod-2 phases".to_string())
}

fn criterion_4_erschler_singular(c: &Corpus) -> Result<String, String> {
    let nuc = nucleus_of(&c.grigorchuk_erschler)?;
    let budget = SearchBudget::default();
    for t in [0u64, 2, 3, 6] {
        let w = search_witness(&c.grigorchuk_erschler, &nuc, t, &budget)
            .map_err(|e| e.to_string())?
            .ok_or(format!("no (S_{}) witness found", t))?;
        if w.candidate.n() != 4 {
            return Err(format!("witness for t={} has n={}", t, w.candidate.n()));
        }
        let f = build_singular(&c.grigorchuk_erschler, &w).map_err(|e| e.to_string())?;
        if is_zero(&c.grigorchuk_erschler, &f).map_err(|e| e.to_string())?
            || !is_singular(&c.grigorchuk_erschler, &f).map_err(|e| e.to_string())?
        {
            return Err(format!("constructed element for t={} not verified", t));
        }
    }
    Ok("witnesses with n = 4 and verified nonzero singular elements for t in {0,2,3,6}".to_string())
}

fn criterion_5_grigorchuk_char2(c: &Corpus) -> Result<String, String> {
    let nuc = nucleus_of(&c.grigorchuk)?;
    let budget = SearchBudget::default();
    let w = search_witness(&c.grigorchuk, &nuc, 2, &budget)
        .map_err(|e| e.to_string())?
        .ok_or("no (S_2) witness found")?;
    let names: Vec<String> = w
        .candidate
        .elems
        .iter()
        .map(|g| format!("{}", g.display(&c.grigorchuk)))
        .collect();
    if names != ["e", "b", "c", "d"] || !w.candidate.v.is_empty() {
        return Err(format!("unexpected witness candidate {:?}", names));
    }
    if w.kernel != [1, 1, 1, 1] {
        return Err(format!("unexpected kernel {:?}", w.kernel));
    }
    let mut patterns: Vec<Vec<usize>> = w.patterns.realizable.iter().map(|(s, _)| s.clone()).collect();
    patterns.sort();
    let expected: Vec<Vec<usize>> = vec![
        vec![0, 1],
        vec![0, 2],
        vec![0, 3],
        vec![1, 2],
        vec![1, 3],
        vec![2, 3],
    ];
    if patterns != expected {
        return Err(format!("unexpected patterns {:?}", patterns));
    }
    // Cross-check: at the points 1^k 0 (0), k <= 9, the germ coincidences
    // match the pattern family.
    for k in 0..=9usize {
        let mut pre = vec![1u8; k];
        pre.push(0);
        let omega = EvPeriodicWord::new(&pre, &[0]);
        let germs: Vec<Germ> = w
            .candidate
            .elems
            .iter()
            .map(|g| Germ::of_element(g.clone(), omega.clone()))
            .collect();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        'next: for i in 0..germs.len() {
            for b in blocks.iter_mut() {
                if germ_equal(&c.grigorchuk, &germs[b[0]], &germs[i]).map_err(|e| e.to_string())? {
                    b.push(i);
                    continue 'next;
                }
            }
            blocks.push(vec![i]);
        }
        for b in blocks {
            if b.len() > 1 && !patterns.contains(&b) {
                return Err(format!("pattern {:?} at 1^{}0(0) missing", b, k));
            }
        }
    }
    let f = build_singular(&c.grigorchuk, &w).map_err(|e| e.to_string())?;
    if is_zero(&c.grigorchuk, &f).map_err(|e| e.to_string())?
        || !is_singular(&c.grigorchuk, &f).map_err(|e| e.to_string())?
    {
        return Err("mod-2 witness element not verified".to_string());
    }
    // And over the rationals nothing turns up at the stated budget,
    // consistent with the vanishing singular ideal.
    let none = search_witness(&c.grigorchuk, &nuc, 0, &budget).map_err(|e| e.to_string())?;
    if none.is_some() {
        return Err("unexpected (S_0) witness for the first group".to_string());
    }
    Ok("(e,b,c,d; X) with six pairwise patterns, kernel (1,1,1,1); no (S_0) witness at budget"
        .to_string())
}

fn criterion_6_regular_open(c: &Corpus) -> Result<String, String> {
    let nuc = nucleus_of(&c.grigorchuk)?;
    match d0_status(&c.grigorchuk, &nuc, 2).map_err(|e| e.to_string())? {
        D0Status::NonEmpty { .. } => {}
        other => return Err(format!("grigorchuk d0 = {:?}", other)),
    }
    match find_nonregular_witness(&c.grigorchuk, &nuc, 2).map_err(|e| e.to_string())? {
        NonRegularOutcome::Found(set) => {
            if regular_open(&c.grigorchuk, &nuc, &set, 2).map_err(|e| e.to_string())? {
                return Err("witness passed the regular-open test".to_string());
            }
        }
        other => return Err(format!("grigorchuk witness search = {:?}", other)),
    }
    let gsnuc = nucleus_of(&c.gupta_sidki3)?;
    if !matches!(
        d0_status(&c.gupta_sidki3, &gsnuc, 2).map_err(|e| e.to_string())?,
        D0Status::Empty
    ) {
        return Err("gupta-sidki d0 not EMPTY".to_string());
    }
    let onuc = nucleus_of(&c.odometer)?;
    if !matches!(
        d0_status(&c.odometer, &onuc, 2).map_err(|e| e.to_string())?,
        D0Status::Empty
    ) {
        return Err("odometer d0 not EMPTY".to_string());
    }
    Ok("grigorchuk NONEMPTY with a verified non-regular-open set; gupta-sidki and odometer EMPTY"
        .to_string())
}

fn criterion_7_algebra_suite(c: &Corpus) -> Result<String, String> {
    let aut = &c.grigorchuk;
    let nuc = nucleus_of(aut)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xA16E_B7A5);

    // Arrow pool: nucleus products of length <= 2.
    let mut pool = vec![GroupElement::identity()];
    for n in nuc.non_identity() {
        pool.push(nuc.element(n).clone());
    }
    let singles = pool.clone();
    for g in &singles {
        for h in &singles {
            let p = GroupElement::multiply(aut, g, h);
            if !pool.contains(&p) {
                pool.push(p);
            }
        }
    }
    let points: Vec<EvPeriodicWord> = {
        let mut pts = Vec::new();
        for a in 0..2u8 {
            pts.push(EvPeriodicWord::constant(a));
            for b in 0..2u8 {
                pts.push(EvPeriodicWord::new(&[a], &[b]));
                for d in 0..2u8 {
                    pts.push(EvPeriodicWord::new(&[], &[a, b, d]));
                    pts.push(EvPeriodicWord::new(&[a, b], &[d]));
                }
            }
        }
        pts.sort();
        pts.dedup();
        pts
    };
    let random_cell = |rng: &mut ChaCha8Rng| -> Cell {
        let g = pool[rng.gen_range(0..pool.len())].clone();
        let leg = rng.gen_range(0..=2usize);
        let word = |rng: &mut ChaCha8Rng, len: usize| {
            FiniteWord((0..len).map(|_| rng.gen_range(0..2u8)).collect())
        };
        Cell {
            u: word(rng, leg),
            g,
            v: word(rng, leg),
            w: if rng.gen_bool(0.7) {
                Clopen::full()
            } else {
                let len = rng.gen_range(0..=2);
                Clopen::cylinder(word(rng, len))
            },
        }
    };

    // Associativity and anti-multiplicativity: 50 random triples over Q
    // and Z/6, evaluated at 200 random germs.
    for ring in [Ring::Q, Ring::Zmod(6)] {
        for _ in 0..25 {
            let rand_elem = |rng: &mut ChaCha8Rng| {
                let terms = (0..rng.gen_range(1..=3))
                    .map(|_| {
                        let coeff = loop {
                            let c = ring.from_integer(rng.gen_range(-2i64..=2));
                            if !c.is_zero() {
                                break c;
                            }
                        };
                        (coeff, random_cell(rng))
                    })
                    .collect();
                AlgebraElement::from_terms(ring, terms).unwrap()
            };
            let f = rand_elem(&mut rng);
            let g = rand_elem(&mut rng);
            let h = rand_elem(&mut rng);
            let left = convolve(aut, &convolve(aut, &f, &g).map_err(|e| e.to_string())?, &h)
                .map_err(|e| e.to_string())?;
            let right = convolve(aut, &f, &convolve(aut, &g, &h).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let istar = involute(aut, &convolve(aut, &f, &g).map_err(|e| e.to_string())?);
            let star = convolve(aut, &involute(aut, &g), &involute(aut, &f))
                .map_err(|e| e.to_string())?;
            for _ in 0..200 {
                let germ = Germ::of_element(
                    pool[rng.gen_range(0..pool.len())].clone(),
                    points[rng.gen_range(0..points.len())].clone(),
                );
                let l = evaluate(aut, &left, &germ).map_err(|e| e.to_string())?;
                let r = evaluate(aut, &right, &germ).map_err(|e| e.to_string())?;
                if l != r {
                    return Err(format!("associativity failed at {:?}", germ.base));
                }
                let li = evaluate(aut, &istar, &germ).map_err(|e| e.to_string())?;
                let ri = evaluate(aut, &star, &germ).map_err(|e| e.to_string())?;
                if li != ri {
                    return Err("involution anti-multiplicativity failed".to_string());
                }
            }
        }
    }

    // Decomposition round-trip on 20 random covered elements.
    let cover: Vec<Cell> = ["b", "c", "a"]
        .iter()
        .map(|n| Cell::of_element(GroupElement::parse(aut, n).unwrap()))
        .collect();
    for _ in 0..20 {
        let ring = Ring::Q;
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let base = &cover[rng.gen_range(0..cover.len())];
            let z = FiniteWord((0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..2u8)).collect());
            let coeff = loop {
                let cc = ring.from_integer(rng.gen_range(-2i64..=2));
                if !cc.is_zero() {
                    break cc;
                }
            };
            terms.push((
                coeff,
                Cell {
                    u: act_word(aut, &base.g, &z),
                    g: ssg_core::element::section(aut, &base.g, &z),
                    v: z,
                    w: Clopen::full(),
                },
            ));
        }
        let f = AlgebraElement::from_terms(ring, terms).unwrap();
        let parts = decompose(aut, &f, &cover).map_err(|e| e.to_string())?;
        let mut sum = AlgebraElement::zero(ring);
        for p in &parts {
            sum = add(&sum, p).map_err(|e| e.to_string())?;
        }
        if !equal(aut, &sum, &f).map_err(|e| e.to_string())? {
            return Err("decomposition round-trip failed".to_string());
        }
        for _ in 0..100 {
            let germ = Germ::of_element(
                pool[rng.gen_range(0..pool.len())].clone(),
                points[rng.gen_range(0..points.len())].clone(),
            );
            let direct = evaluate(aut, &f, &germ).map_err(|e| e.to_string())?;
            let mut acc = ring.zero();
            for p in &parts {
                acc = ring
                    .add(&acc, &evaluate(aut, p, &germ).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
            }
            if acc != direct {
                return Err("decomposition evaluation mismatch".to_string());
            }
        }
    }

    // Cover evaluation matches realizing sequences on the bundled
    // witnesses.
    struct WitnessCase<'a> {
        aut: &'a Automaton,
        ring: Ring,
        names: [&'static str; 4],
        coeffs: [i64; 4],
    }
    let cases = [
        WitnessCase {
            aut: &c.grigorchuk,
            ring: Ring::Zmod(2),
            names: ["", "b", "c", "d"],
            coeffs: [1, 1, 1, 1],
        },
        WitnessCase {
            aut: &c.grigorchuk_erschler,
            ring: Ring::Q,
            names: ["", "alpha", "beta", "gamma"],
            coeffs: [1, -1, -1, 1],
        },
    ];
    for case in cases {
        let wn = nucleus_of(case.aut)?;
        let f = AlgebraElement::from_terms(
            case.ring,
            case.names
                .iter()
                .zip(case.coeffs.iter())
                .map(|(n, &cc)| {
                    (
                        case.ring.from_integer(cc),
                        Cell::of_element(GroupElement::parse(case.aut, n).unwrap()),
                    )
                })
                .collect(),
        )
        .unwrap();
        let omega = EvPeriodicWord::constant(1);
        for point in fiber(case.aut, &wn, &omega).map_err(|e| e.to_string())? {
            let expected = evaluate_cover(case.aut, &wn, &f, &point).map_err(|e| e.to_string())?;
            let period = point.patterns.len().max(1);
            for pat in &point.patterns {
                for lap in 0..3 {
                    let depth = pat.depth + lap * period;
                    let approx = pat.sample_tail.with_prefix(&omega.prefix(depth));
                    let v = evaluate(case.aut, &f, &Germ::unit(approx)).map_err(|e| e.to_string())?;
                    if v != expected {
                        return Err("cover evaluation mismatch with realizing sequence".to_string());
                    }
                }
            }
        }
    }
    Ok("associativity, involution, decomposition and cover-evaluation checks passed".to_string())
}

fn criterion_8_word_problem(c: &Corpus) -> Result<String, String> {
    let aut = &c.grigorchuk;
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
            words.push(GroupElement::from_gens(aut, v.clone()));
        }
        frontier = next;
    }
    words.sort();
    words.dedup();
    let mut depth8 = vec![FiniteWord::empty()];
    for _ in 0..8 {
        let mut next = Vec::new();
        for w in &depth8 {
            for x in aut.alphabet.letters() {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        depth8 = next;
    }
    let mut trivial_count = 0usize;
    for g in &words {
        let fast = is_trivial(aut, g).map_err(|e| e.to_string())?;
        let slow = depth8.iter().all(|u| act_word(aut, g, u) == *u);
        if fast != slow {
            return Err(format!("word problem mismatch on {:?}", g));
        }
        if fast {
            trivial_count += 1;
        }
    }
    // Spot-check the named relations.
    let parse = |s: &str| GroupElement::parse(aut, s).unwrap();
    for (lhs, rhs) in [("b.c", "d"), ("b.b", ""), ("c.c", ""), ("d.d", "")] {
        let prod = GroupElement::multiply(aut, &parse(lhs), &parse(rhs).invert());
        if !is_trivial(aut, &prod).map_err(|e| e.to_string())? {
            return Err(format!("relation {} = {} failed", lhs, rhs));
        }
    }
    Ok(format!(
        "{} words checked against the depth-8 oracle ({} trivial)",
        words.len(),
        trivial_count
    ))
}

fn criterion_9_span_bruteforce(_c: &Corpus) -> Result<String, String> {
    let pool: Vec<Vec<usize>> = vec![
        vec![0, 1],
        vec![0, 2],
        vec![0, 3],
        vec![1, 2],
        vec![1, 3],
        vec![2, 3],
        vec![0, 1, 2],
        vec![0, 1, 3],
        vec![1, 2, 3],
    ];
    let mut checked = 0usize;
    for n in 2..=4usize {
        let usable: Vec<&Vec<usize>> = pool.iter().filter(|s| s.iter().all(|&i| i < n)).collect();
        for mask in 0..(1usize << usable.len()) {
            let chosen: Vec<&[usize]> = usable
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| s.as_slice())
                .collect();
            if chosen.len() > 6 {
                continue;
            }
            for t in 2..=3u64 {
                let fast = span_full(&chosen, n, t);
                let slow = span_full_bruteforce(&chosen, n, t);
                if fast.full != slow {
                    return Err(format!("span mismatch n={} t={} {:?}", n, t, chosen));
                }
                if let Some(kernel) = fast.kernel {
                    if kernel.iter().all(|&x| x.rem_euclid(t as i64) == 0) {
                        return Err("zero kernel functional".to_string());
                    }
                    for s in &chosen {
                        let dot: i64 = s.iter().map(|&i| kernel[i]).sum();
                        if dot.rem_euclid(t as i64) != 0 {
                            return Err("kernel does not annihilate a pattern".to_string());
                        }
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{} (patterns, t) pairs against exhaustive enumeration", checked))
}

/// Run the whole acceptance suite; one result per criterion, including the
/// stated wall-clock bound.
pub fn run_all(corpus: &str) -> Vec<CriterionResult> {
    let corpus = match load_corpus(corpus) {
        Ok(c) => c,
        Err(e) => {
            return vec![CriterionResult {
                name: "corpus",
                pass: false,
                detail: e,
                elapsed_ms: 0,
            }]
        }
    };
    let criteria: Vec<(&'static str, u64, Check)> = vec![
        ("1: nucleus reproduction", 3_000, criterion_1_nucleus),
        ("2: dangerous points", 2_000, criterion_2_dangerous),
        ("3: Hausdorff-cover fibers", 4_000, criterion_3_fibers),
        ("4: singular ideal, positive", 40_000, criterion_4_erschler_singular),
        ("5: singular ideal, characteristic 2", 60_000, criterion_5_grigorchuk_char2),
        ("6: regular-open / D0", 30_000, criterion_6_regular_open),
        ("7: algebra property suite", 60_000, criterion_7_algebra_suite),
        ("8: word-problem oracle", 5_000, criterion_8_word_problem),
        ("9: span brute-force equivalence", 5_000, criterion_9_span_bruteforce),
    ];
    let mut out = Vec::new();
    for (name, bound_ms, check) in criteria {
        let start = Instant::now();
        let result = check(&corpus);
        let elapsed_ms = start.elapsed().as_millis() as u64;
        let (pass, detail) = match result {
            Ok(d) => {
                if elapsed_ms <= bound_ms {
                    (true, d)
                } else {
                    (
                        false,
                        format!("{} (exceeded {} ms bound: {} ms)", d, bound_ms, elapsed_ms),
                    )
                }
            }
            Err(e) => (false, e),
        };
        out.push(CriterionResult {
            name,
            pass,
            detail,
            elapsed_ms,
        });
    }
    out
}
