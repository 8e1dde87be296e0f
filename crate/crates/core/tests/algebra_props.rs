//! Randomized semantic checks for the groupoid algebra: convolution
//! associativity, involution anti-multiplicativity, the ideal property of
//! singular elements, decomposition round-trips, and the consistency of
//! cover evaluation with realizing sequences. All sampling is seeded.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use ssg_core::element::GroupElement;
use ssg_core::groupoid::{fiber, germ_equal, Cell, Clopen, Germ};
use ssg_core::nucleus::{compute_nucleus, Nucleus, NucleusBudget};
use ssg_core::samples;
use ssg_core::steinberg::{
    add, convolve, decompose, equal, evaluate, evaluate_cover, involute, is_singular, scale,
    AlgebraElement, Ring, Scalar,
};
use ssg_core::word::{EvPeriodicWord, FiniteWord, Letter};
use ssg_core::Automaton;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x0920_1bdf)
}

fn nucleus_of(aut: &Automaton) -> Nucleus {
    compute_nucleus(aut, &NucleusBudget::default())
        .unwrap()
        .certificate()
        .unwrap()
        .nucleus
}

/// Arrows for random cells and germs: products of at most two nucleus
/// members.
fn arrow_pool(aut: &Automaton, nuc: &Nucleus) -> Vec<GroupElement> {
    let mut pool = vec![GroupElement::identity()];
    for n in nuc.non_identity() {
        pool.push(nuc.element(n).clone());
    }
    let singles = pool.clone();
    for g in &singles {
        for h in &singles {
            let prod = GroupElement::multiply(aut, g, h);
            if !pool.contains(&prod) {
                pool.push(prod);
            }
        }
    }
    pool
}

/// Base points: a fixed list of eventually periodic words of period <= 3.
fn base_points(aut: &Automaton) -> Vec<EvPeriodicWord> {
    let k = aut.alphabet.size as Letter;
    let mut pts = Vec::new();
    for a in 0..k {
        pts.push(EvPeriodicWord::constant(a));
        for b in 0..k {
            pts.push(EvPeriodicWord::new(&[a], &[b]));
            for c in 0..k {
                pts.push(EvPeriodicWord::new(&[], &[a, b, c]));
                pts.push(EvPeriodicWord::new(&[a, b], &[c]));
            }
        }
    }
    pts.sort();
    pts.dedup();
    pts
}

fn random_word(aut: &Automaton, rng: &mut ChaCha8Rng, max_len: usize) -> FiniteWord {
    let len = rng.gen_range(0..=max_len);
    FiniteWord(
        (0..len)
            .map(|_| rng.gen_range(0..aut.alphabet.size) as Letter)
            .collect(),
    )
}

/// A random depth-<=2 cell with legs of equal length.
fn random_cell(
    aut: &Automaton,
    pool: &[GroupElement],
    rng: &mut ChaCha8Rng,
) -> Cell {
    let g = pool[rng.gen_range(0..pool.len())].clone();
    let leg_len = rng.gen_range(0..=2usize);
    let v = random_word(aut, rng, leg_len);
    let u = random_word(aut, rng, leg_len);
    let w = if rng.gen_bool(0.7) {
        Clopen::full()
    } else {
        Clopen::cylinder(random_word(aut, rng, 2))
    };
    Cell { u, g, v, w }
}

fn random_element(
    aut: &Automaton,
    ring: Ring,
    pool: &[GroupElement],
    rng: &mut ChaCha8Rng,
) -> AlgebraElement {
    let n_terms = rng.gen_range(1..=3);
    let terms = (0..n_terms)
        .map(|_| {
            let c = loop {
                let c = ring.from_integer(rng.gen_range(-2i64..=2));
                if !c.is_zero() {
                    break c;
                }
            };
            (c, random_cell(aut, pool, rng))
        })
        .collect();
    AlgebraElement::from_terms(ring, terms).unwrap()
}

/// Germs to sample evaluations at: all pool arrows over all base points
/// (with empty legs), thinned by the rng.
fn sample_germs(
    aut: &Automaton,
    pool: &[GroupElement],
    rng: &mut ChaCha8Rng,
    count: usize,
) -> Vec<Germ> {
    let points = base_points(aut);
    let mut germs = Vec::new();
    while germs.len() < count {
        let g = pool[rng.gen_range(0..pool.len())].clone();
        let p = points[rng.gen_range(0..points.len())].clone();
        germs.push(Germ::of_element(g, p));
    }
    germs
}

#[test]
fn convolution_is_associative_semantically() {
    let aut = samples::grigorchuk();
    let nuc = nucleus_of(&aut);
    let pool = arrow_pool(&aut, &nuc);
    let mut rng = rng();
    for ring in [Ring::Q, Ring::Zmod(6)] {
        for _ in 0..25 {
            let f = random_element(&aut, ring, &pool, &mut rng);
            let g = random_element(&aut, ring, &pool, &mut rng);
            let h = random_element(&aut, ring, &pool, &mut rng);
            let left = convolve(&aut, &convolve(&aut, &f, &g).unwrap(), &h).unwrap();
            let right = convolve(&aut, &f, &convolve(&aut, &g, &h).unwrap()).unwrap();
            for germ in sample_germs(&aut, &pool, &mut rng, 100) {
                assert_eq!(
                    evaluate(&aut, &left, &germ).unwrap(),
                    evaluate(&aut, &right, &germ).unwrap(),
                );
            }
        }
    }
}

#[test]
fn involution_is_anti_multiplicative() {
    let aut = samples::grigorchuk();
    let nuc = nucleus_of(&aut);
    let pool = arrow_pool(&aut, &nuc);
    let mut rng = rng();
    for ring in [Ring::Q, Ring::Zmod(6)] {
        for _ in 0..25 {
            let f = random_element(&aut, ring, &pool, &mut rng);
            let g = random_element(&aut, ring, &pool, &mut rng);
            let lhs = involute(&aut, &convolve(&aut, &f, &g).unwrap());
            let rhs = convolve(&aut, &involute(&aut, &g), &involute(&aut, &f)).unwrap();
            for germ in sample_germs(&aut, &pool, &mut rng, 100) {
                assert_eq!(
                    evaluate(&aut, &lhs, &germ).unwrap(),
                    evaluate(&aut, &rhs, &germ).unwrap(),
                );
            }
            // Involution is additive and involutive.
            let sum = add(&f, &g).unwrap();
            let invsum = involute(&aut, &sum);
            let suminv = add(&involute(&aut, &f), &involute(&aut, &g)).unwrap();
            assert!(equal(&aut, &invsum, &suminv).unwrap());
            assert!(equal(&aut, &involute(&aut, &invsum), &sum).unwrap());
        }
    }
}

#[test]
fn convolution_agrees_with_bruteforce_double_sum() {
    // (f * g)(γ) = Σ f(γ h^{-1}) g(h) over the germs h of g's cells at the
    // source point, computed without the cell-composition path.
    let aut = samples::grigorchuk();
    let nuc = nucleus_of(&aut);
    let pool = arrow_pool(&aut, &nuc);
    let mut rng = rng();
    let ring = Ring::Zmod(2);
    let witness = AlgebraElement::from_terms(
        ring,
        ["", "b", "c", "d"]
            .iter()
            .map(|n| {
                (
                    ring.one(),
                    Cell::of_element(GroupElement::parse(&aut, n).unwrap()),
                )
            })
            .collect(),
    )
    .unwrap();
    let square = convolve(&aut, &witness, &witness).unwrap();
    for germ in sample_germs(&aut, &pool, &mut rng, 100) {
        // Brute force: enumerate germs of the right factor's cells at the
        // base point; pair with the left factor at the quotient germ.
        let mut acc = ring.zero();
        let mut seen: Vec<Germ> = Vec::new();
        for (coeff, cell) in &witness.terms {
            let Some(h) = cell.germ_at(&germ.base) else {
                continue;
            };
            if seen.iter().any(|s| germ_equal(&aut, s, &h).unwrap()) {
                continue;
            }
            seen.push(h.clone());
            let _ = coeff;
            // g-value at h: sum over cells of the witness at this germ.
            let gval = evaluate(&aut, &witness, &h).unwrap();
            // f-value at γ h^{-1}.
            let hinv = h.invert(&aut).unwrap();
            let Some(quot) = ssg_core::groupoid::germ_compose(&aut, &germ, &hinv).unwrap() else {
                continue;
            };
            let fval = evaluate(&aut, &witness, &quot).unwrap();
            acc = ring.add(&acc, &ring.mul(&fval, &gval).unwrap()).unwrap();
        }
        assert_eq!(evaluate(&aut, &square, &germ).unwrap(), acc);
    }
}

#[test]
fn singular_elements_absorb_products() {
    // Singularity is an ideal property: products with random elements stay
    // singular.
    let aut = samples::grigorchuk();
    let nuc = nucleus_of(&aut);
    let pool = arrow_pool(&aut, &nuc);
    let mut rng = rng();
    let ring = Ring::Zmod(2);
    let witness = AlgebraElement::from_terms(
        ring,
        ["", "b", "c", "d"]
            .iter()
            .map(|n| {
                (
                    ring.one(),
                    Cell::of_element(GroupElement::parse(&aut, n).unwrap()),
                )
            })
            .collect(),
    )
    .unwrap();
    assert!(is_singular(&aut, &witness).unwrap());
    for _ in 0..15 {
        let g = random_element(&aut, ring, &pool, &mut rng);
        let left = convolve(&aut, &g, &witness).unwrap();
        let right = convolve(&aut, &witness, &g).unwrap();
        assert!(is_singular(&aut, &left).unwrap());
        assert!(is_singular(&aut, &right).unwrap());
    }
}

#[test]
fn decomposition_round_trips_on_random_covered_elements() {
    // Random elements built from subcells of a known cover decompose into
    // parts supported in the cover, summing back to the element.
    let aut = samples::grigorchuk();
    let mut rng = rng();
    let ring = Ring::Q;
    let cover: Vec<Cell> = ["b", "c", "a"]
        .iter()
        .map(|n| Cell::of_element(GroupElement::parse(&aut, n).unwrap()))
        .collect();
    for _ in 0..20 {
        // Subcells of cover cells: localize over random cylinders.
        let n_terms = rng.gen_range(1..=3);
        let mut terms = Vec::new();
        for _ in 0..n_terms {
            let base = &cover[rng.gen_range(0..cover.len())];
            let z = random_word(&aut, &mut rng, 2);
            let u = ssg_core::element::act_word(&aut, &base.g, &z);
            let g = ssg_core::element::section(&aut, &base.g, &z);
            let coeff = loop {
                let c = ring.from_integer(rng.gen_range(-2i64..=2));
                if !c.is_zero() {
                    break c;
                }
            };
            terms.push((
                coeff,
                Cell {
                    u,
                    g,
                    v: z,
                    w: Clopen::full(),
                },
            ));
        }
        let f = AlgebraElement::from_terms(ring, terms).unwrap();
        let parts = decompose(&aut, &f, &cover).unwrap();
        assert_eq!(parts.len(), cover.len());
        let mut sum = AlgebraElement::zero(ring);
        for p in &parts {
            sum = add(&sum, p).unwrap();
        }
        assert!(equal(&aut, &sum, &f).unwrap());
    }
}

#[test]
fn scale_distributes_and_zero_annihilates() {
    let aut = samples::grigorchuk();
    let nuc = nucleus_of(&aut);
    let pool = arrow_pool(&aut, &nuc);
    let mut rng = rng();
    let ring = Ring::Zmod(6);
    for _ in 0..20 {
        let f = random_element(&aut, ring, &pool, &mut rng);
        let g = random_element(&aut, ring, &pool, &mut rng);
        let c = ring.from_integer(rng.gen_range(-5i64..=5));
        let lhs = scale(&c, &add(&f, &g).unwrap()).unwrap();
        let rhs = add(&scale(&c, &f).unwrap(), &scale(&c, &g).unwrap()).unwrap();
        assert!(equal(&aut, &lhs, &rhs).unwrap());
        let zero = scale(&ring.zero(), &f).unwrap();
        assert!(zero.terms.is_empty());
    }
}

#[test]
fn cover_evaluation_matches_realizing_sequences() {
    // For each cover point P with realizing samples at phases l, l+p, l+2p,
    // the value of f at the unit germ of the approximating points is
    // eventually constant and equals evaluate_cover(f, P).
    struct Case {
        aut: Automaton,
        ring: Ring,
        names: Vec<&'static str>,
        coeffs: Vec<i64>,
    }
    let cases = vec![
        Case {
            aut: samples::grigorchuk(),
            ring: Ring::Zmod(2),
            names: vec!["", "b", "c", "d"],
            coeffs: vec![1, 1, 1, 1],
        },
        Case {
            aut: samples::grigorchuk_erschler(),
            ring: Ring::Q,
            names: vec!["", "alpha", "beta", "gamma"],
            coeffs: vec![1, -1, -1, 1],
        },
        Case {
            aut: samples::grigorchuk_erschler(),
            ring: Ring::Zmod(3),
            names: vec!["", "alpha", "beta", "gamma"],
            coeffs: vec![1, 2, 2, 1],
        },
    ];
    for case in cases {
        let aut = &case.aut;
        let nuc = nucleus_of(aut);
        let f = AlgebraElement::from_terms(
            case.ring,
            case.names
                .iter()
                .zip(case.coeffs.iter())
                .map(|(n, &c)| {
                    (
                        case.ring.from_integer(c),
                        Cell::of_element(GroupElement::parse(aut, n).unwrap()),
                    )
                })
                .collect(),
        )
        .unwrap();
        let omega = EvPeriodicWord::constant(1);
        for point in fiber(aut, &nuc, &omega).unwrap() {
            let expected = evaluate_cover(aut, &nuc, &f, &point).unwrap();
            // Track the pattern of the first phase through three laps of
            // the tracked period.
            let period = point.patterns.len().max(1);
            for pat in &point.patterns {
                for lap in 0..3 {
                    let depth = pat.depth + lap * period;
                    let approx = pat.sample_tail.with_prefix(&omega.prefix(depth));
                    let unit = Germ::unit(approx);
                    let value = evaluate(aut, &f, &unit).unwrap();
                    assert_eq!(
                        value, expected,
                        "point {:?} at depth {}",
                        point.members, depth
                    );
                }
            }
        }
    }
}

#[test]
fn germ_equivalence_on_random_triples() {
    let aut = samples::grigorchuk();
    let nuc = nucleus_of(&aut);
    let pool = arrow_pool(&aut, &nuc);
    let mut rng = rng();
    let points = base_points(&aut);
    for _ in 0..500 {
        let p = points[rng.gen_range(0..points.len())].clone();
        let triple: Vec<Germ> = (0..3)
            .map(|_| Germ::of_element(pool[rng.gen_range(0..pool.len())].clone(), p.clone()))
            .collect();
        let [x, y, z] = [&triple[0], &triple[1], &triple[2]];
        assert!(germ_equal(&aut, x, x).unwrap());
        assert_eq!(
            germ_equal(&aut, x, y).unwrap(),
            germ_equal(&aut, y, x).unwrap()
        );
        if germ_equal(&aut, x, y).unwrap() && germ_equal(&aut, y, z).unwrap() {
            assert!(germ_equal(&aut, x, z).unwrap());
        }
    }
}

#[test]
fn cell_composition_associativity_on_random_germs() {
    let aut = samples::grigorchuk();
    let nuc = nucleus_of(&aut);
    let pool = arrow_pool(&aut, &nuc);
    let mut rng = rng();
    let mut checked = 0usize;
    while checked < 200 {
        let c1 = random_cell(&aut, &pool, &mut rng);
        let c2 = random_cell(&aut, &pool, &mut rng);
        let c3 = random_cell(&aut, &pool, &mut rng);
        let left: Vec<Cell> = ssg_core::groupoid::compose_cells(&aut, &c1, &c2)
            .cells
            .iter()
            .flat_map(|c12| ssg_core::groupoid::compose_cells(&aut, c12, &c3).cells)
            .collect();
        let right: Vec<Cell> = ssg_core::groupoid::compose_cells(&aut, &c2, &c3)
            .cells
            .iter()
            .flat_map(|c23| ssg_core::groupoid::compose_cells(&aut, &c1, c23).cells)
            .collect();
        let lset = ssg_core::groupoid::CompactOpenSet::new(left);
        let rset = ssg_core::groupoid::CompactOpenSet::new(right);
        let points = base_points(&aut);
        let p = points[rng.gen_range(0..points.len())].clone();
        for cell in lset.cells.iter().chain(rset.cells.iter()) {
            if let Some(germ) = cell.germ_at(&p) {
                assert_eq!(
                    lset.contains_germ(&aut, &germ).unwrap(),
                    rset.contains_germ(&aut, &germ).unwrap()
                );
                checked += 1;
            }
        }
        checked += 1;
    }
}

#[test]
fn product_cells_factor_through_their_germs() {
    // For points in the source of a composed cell, the composed germ is
    // exactly the composition of the factors' germs.
    let aut = samples::grigorchuk();
    let nuc = nucleus_of(&aut);
    let pool = arrow_pool(&aut, &nuc);
    let mut rng = rng();
    let points = base_points(&aut);
    let mut checked = 0usize;
    let mut attempts = 0usize;
    while checked < 100 && attempts < 4000 {
        attempts += 1;
        let c1 = random_cell(&aut, &pool, &mut rng);
        let c2 = random_cell(&aut, &pool, &mut rng);
        let prod = ssg_core::groupoid::compose_cells(&aut, &c1, &c2);
        let Some(pcell) = prod.cells.first() else {
            continue;
        };
        for p in &points {
            let Some(pg) = pcell.germ_at(p) else { continue };
            let g2 = c2.germ_at(p).expect("product source inside c2 source");
            let mid = g2.range_point(&aut).unwrap();
            let g1 = c1.germ_at(&mid).expect("middle point inside c1 source");
            let composed = ssg_core::groupoid::germ_compose(&aut, &g1, &g2)
                .unwrap()
                .expect("bases match by construction");
            assert!(germ_equal(&aut, &pg, &composed).unwrap());
            checked += 1;
        }
    }
    assert!(checked >= 100, "only {} germ factorizations checked", checked);
}

#[test]
fn scalar_arithmetic_edge_cases() {
    let q = Ring::Q;
    let half = Scalar::Q(num_rational::Ratio::new(1, 2));
    assert_eq!(
        q.add(&half, &half).unwrap(),
        Scalar::Q(num_rational::Ratio::from_integer(1))
    );
    let z6 = Ring::Zmod(6);
    let four = z6.from_integer(4);
    let five = z6.from_integer(-1);
    assert_eq!(five, Scalar::Mod(5));
    assert_eq!(z6.add(&four, &five).unwrap(), Scalar::Mod(3));
    assert_eq!(z6.mul(&four, &five).unwrap(), Scalar::Mod(2));
    assert!(z6.add(&four, &half).is_err());
}
