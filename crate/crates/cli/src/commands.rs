//! Implementations of the CLI subcommands: each loads its inputs, runs the
//! corresponding toolkit operation, and assembles a [`Report`] plus an exit
//! code (0/1 for verdict-bearing commands).

use serde_json::{json, Value};

use ssg_core::element::GroupElement;
use ssg_core::groupoid::{
    d0_status, fiber, find_nonregular_witness, is_dangerous, member_names, regular_open,
    CompactOpenSet, D0Status, NonRegularOutcome,
};
use ssg_core::nucleus::{compute_nucleus, ContractionCertificate, NucleusBudget, NucleusOutcome};
use ssg_core::regset::{tf_classify, TfClass};
use ssg_core::scond::{
    build_singular, search_witness, simplicity_report, SearchBudget, SimplicityVerdict, SWitness,
};
use ssg_core::steinberg::{evaluate, Ring};
use ssg_core::word::EvPeriodicWord;
use ssg_core::{Automaton, BudgetExceeded};

use crate::expr;
use crate::report::Report;

/// Command-level errors, mapped onto exit codes by `main`.
#[derive(Debug)]
pub enum CmdError {
    /// Unreadable input or malformed literal: exit 2.
    Parse(String),
    /// Budget exhaustion: exit 3.
    Budget(String),
}

impl From<BudgetExceeded> for CmdError {
    fn from(e: BudgetExceeded) -> Self {
        CmdError::Budget(e.to_string())
    }
}

impl From<ssg_core::AlgebraError> for CmdError {
    fn from(e: ssg_core::AlgebraError) -> Self {
        match e {
            ssg_core::AlgebraError::Budget(b) => CmdError::Budget(b.to_string()),
            other => CmdError::Parse(other.to_string()),
        }
    }
}

pub fn load_automaton(path: &str) -> Result<Automaton, CmdError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdError::Parse(format!("cannot read `{}`: {}", path, e)))?;
    Automaton::parse(&text).map_err(|e| CmdError::Parse(e.to_string()))
}

fn certified_nucleus(aut: &Automaton) -> Result<ContractionCertificate, CmdError> {
    match compute_nucleus(aut, &NucleusBudget::default())? {
        NucleusOutcome::Contracting(cert) => Ok(cert),
        NucleusOutcome::Inconclusive { reason } => Err(CmdError::Budget(format!(
            "nucleus search inconclusive: {}",
            reason
        ))),
    }
}

fn parse_point(s: &str) -> Result<EvPeriodicWord, CmdError> {
    EvPeriodicWord::parse(s).map_err(CmdError::Parse)
}

pub fn cmd_nucleus(path: &str) -> Result<(Report, i32), CmdError> {
    let aut = load_automaton(path)?;
    let mut report = Report::new("nucleus", json!({ "file": path }));
    let cert = certified_nucleus(&aut)?;
    let nuc = &cert.nucleus;
    report.line(format!(
        "nucleus of {}: {} elements, contraction depth {}",
        path,
        nuc.len(),
        cert.contraction_depth
    ));
    let mut elems = Vec::new();
    for n in 0..nuc.len() {
        let word = format!("{}", nuc.element(n).display(&aut));
        report.line(format!("  {} = {}", nuc.name(n), word));
        elems.push(json!({ "name": nuc.name(n), "word": word }));
    }
    report.line("transitions:");
    let mut table = Vec::new();
    for n in 0..nuc.len() {
        for x in aut.alphabet.letters() {
            report.line(format!(
                "  {} --{}|{}--> {}",
                nuc.name(n),
                x,
                nuc.apply(n, x),
                nuc.name(nuc.step(n, x))
            ));
            table.push(json!({
                "state": nuc.name(n),
                "letter": x,
                "output": nuc.apply(n, x),
                "section": nuc.name(nuc.step(n, x)),
            }));
        }
    }
    report.verdicts = json!({ "size": nuc.len(), "contraction_depth": cert.contraction_depth });
    report.certificates = json!({ "elements": elems, "transitions": table });
    Ok((report, 0))
}

pub fn cmd_tf(path: &str, elem: &str, point: &str) -> Result<(Report, i32), CmdError> {
    let aut = load_automaton(path)?;
    let g = GroupElement::parse(&aut, elem).map_err(CmdError::Parse)?;
    let omega = parse_point(point)?;
    let mut report = Report::new(
        "tf",
        json!({ "file": path, "element": elem, "point": point }),
    );
    let class = tf_classify(&aut, &g, &omega)?;
    let name = match class {
        TfClass::Interior => "INTERIOR",
        TfClass::Boundary => "BOUNDARY",
        TfClass::Outside => "OUTSIDE",
    };
    report.line(format!("{} is {} for TF_{}", omega, name, elem));
    report.verdicts = json!({ "class": name });
    Ok((report, if class == TfClass::Outside { 1 } else { 0 }))
}

pub fn cmd_dangerous(path: &str, point: &str) -> Result<(Report, i32), CmdError> {
    let aut = load_automaton(path)?;
    let omega = parse_point(point)?;
    let cert = certified_nucleus(&aut)?;
    let nuc = &cert.nucleus;
    let mut report = Report::new("dangerous", json!({ "file": path, "point": point }));
    let (dangerous, witnesses) = is_dangerous(&aut, nuc, &omega)?;
    report.line(format!(
        "{} is {}dangerous",
        omega,
        if dangerous { "" } else { "not " }
    ));
    let mut ws = Vec::new();
    for w in &witnesses {
        report.line(format!(
            "  witness: depth {} member {}",
            w.depth,
            nuc.name(w.member)
        ));
        ws.push(json!({ "depth": w.depth, "member": nuc.name(w.member) }));
    }
    report.verdicts = json!({ "dangerous": dangerous });
    report.certificates = json!({ "witnesses": ws });
    Ok((report, if dangerous { 0 } else { 1 }))
}

pub fn cmd_fiber(path: &str, point: &str) -> Result<(Report, i32), CmdError> {
    let aut = load_automaton(path)?;
    let omega = parse_point(point)?;
    let cert = certified_nucleus(&aut)?;
    let nuc = &cert.nucleus;
    let mut report = Report::new("fiber", json!({ "file": path, "point": point }));
    let points = fiber(&aut, nuc, &omega)?;
    report.line(format!(
        "fiber over {}: {} cover point(s)",
        omega,
        points.len()
    ));
    let mut cover_points = Vec::new();
    for p in &points {
        let names = member_names(nuc, &p.members);
        report.line(format!(
            "  members {{{}}} at depth {}",
            names.join(", "),
            p.depth
        ));
        let mut patterns = Vec::new();
        for pat in &p.patterns {
            report.line(format!(
                "    phase depth {}: tail sample {}",
                pat.depth, pat.sample_tail
            ));
            patterns.push(json!({
                "depth": pat.depth,
                "sample_tail": pat.sample_tail.to_string(),
            }));
        }
        cover_points.push(json!({
            "base": p.base.to_string(),
            "depth": p.depth,
            "members": names,
            "patterns": patterns,
        }));
    }
    report.verdicts = json!({ "fiber_size": points.len() });
    report.certificates = json!({ "cover_points": cover_points });
    Ok((report, 0))
}

pub fn cmd_eval(path: &str, elem_expr: &str, germ: &str, t: u64) -> Result<(Report, i32), CmdError> {
    let aut = load_automaton(path)?;
    let ring = Ring::from_t(t);
    let f = expr::parse_element_expr(&aut, ring, elem_expr).map_err(CmdError::Parse)?;
    let g = expr::parse_germ(&aut, germ).map_err(CmdError::Parse)?;
    let mut report = Report::new(
        "eval",
        json!({ "file": path, "elem": elem_expr, "germ": germ, "t": t }),
    );
    let value = evaluate(&aut, &f, &g)?;
    report.line(format!("value = {}", value));
    report.verdicts = json!({ "value": value.to_string(), "ring": ring.to_string() });
    Ok((report, if value.is_zero() { 1 } else { 0 }))
}

fn witness_json(aut: &Automaton, w: &SWitness) -> Value {
    let elems: Vec<String> = w
        .candidate
        .elems
        .iter()
        .map(|g| format!("{}", g.display(aut)))
        .collect();
    let patterns: Vec<Value> = w
        .patterns
        .realizable
        .iter()
        .map(|(set, sample)| {
            json!({
                "indices": set,
                "elements": set.iter().map(|&i| elems[i].clone()).collect::<Vec<_>>(),
                "sample": sample.to_string(),
            })
        })
        .collect();
    // The element expression of the singular element f = Σ a_i 1_{U_i}.
    let expr = w
        .kernel
        .iter()
        .zip(elems.iter())
        .filter(|(&a, _)| a != 0)
        .map(|(a, e)| format!("{}*[{}|{}|{}|]", a, w.candidate.v, e, w.candidate.v))
        .collect::<Vec<_>>()
        .join(" + ");
    json!({
        "elements": elems,
        "V": w.candidate.v.to_string(),
        "patterns": patterns,
        "kernel": w.kernel,
        "t": w.t,
        "singular_element": expr,
    })
}

pub fn cmd_singular_search(
    path: &str,
    t: u64,
    max_n: usize,
    ball: usize,
    depth: usize,
) -> Result<(Report, i32), CmdError> {
    let aut = load_automaton(path)?;
    let cert = certified_nucleus(&aut)?;
    let nuc = &cert.nucleus;
    let mut report = Report::new(
        "singular-search",
        json!({ "file": path, "t": t, "max_n": max_n, "ball": ball, "depth": depth }),
    );
    let budget = SearchBudget {
        max_n,
        elem_ball: ball,
        cyl_depth: depth,
    };
    match search_witness(&aut, nuc, t, &budget)? {
        Some(w) => {
            let f = build_singular(&aut, &w)?;
            let elems: Vec<String> = w
                .candidate
                .elems
                .iter()
                .map(|g| format!("{}", g.display(&aut)))
                .collect();
            let v_name = if w.candidate.v.is_empty() {
                "X".to_string()
            } else {
                format!("{}X", w.candidate.v)
            };
            report.line(format!(
                "condition (S_{}) holds: candidate ({}; V = {}), kernel {:?}",
                t,
                elems.join(", "),
                v_name,
                w.kernel
            ));
            report.line(format!(
                "singular element with {} cell(s), verified nonzero and singular",
                f.terms.len()
            ));
            report.verdicts = json!({ "found": true });
            report.certificates = witness_json(&aut, &w);
            Ok((report, 0))
        }
        None => {
            report.line(format!(
                "no (S_{}) witness at budget (n <= {}, ball <= {}, depth <= {}) — not a proof of absence",
                t, max_n, ball, depth
            ));
            report.verdicts = json!({ "found": false });
            Ok((report, 1))
        }
    }
}

pub fn cmd_simplicity(path: &str, characteristic: u64) -> Result<(Report, i32), CmdError> {
    let aut = load_automaton(path)?;
    let cert = certified_nucleus(&aut)?;
    let nuc = &cert.nucleus;
    let mut report = Report::new(
        "simplicity",
        json!({ "file": path, "char": characteristic }),
    );
    let rep = simplicity_report(&aut, nuc, characteristic, 8, &SearchBudget::default())?;
    report.line(format!(
        "level-transitive to depth {} (budget {})",
        rep.level_transitive_to, rep.level_budget
    ));
    report.line(match &rep.effectiveness_violation {
        None => "no effectiveness violation at budget".to_string(),
        Some((g, v)) => format!(
            "effectiveness violation: element {} over cylinder {}",
            g.display(&aut),
            v
        ),
    });
    let verdict_text = match rep.verdict {
        SimplicityVerdict::NotSimple => format!(
            "Steinberg algebra over any field of characteristic {} is NOT simple",
            characteristic
        ),
        SimplicityVerdict::ConsistentWithSimple => {
            "consistent with simple (bounded evidence)".to_string()
        }
        SimplicityVerdict::Inconclusive => "inconclusive".to_string(),
    };
    report.line(&verdict_text);
    report.verdicts = json!({
        "verdict": match rep.verdict {
            SimplicityVerdict::NotSimple => "not_simple",
            SimplicityVerdict::ConsistentWithSimple => "consistent_with_simple",
            SimplicityVerdict::Inconclusive => "inconclusive",
        },
        "level_transitive_to": rep.level_transitive_to,
    });
    if let Some(w) = &rep.witness {
        report.certificates = witness_json(&aut, w);
    }
    let code = match rep.verdict {
        SimplicityVerdict::NotSimple => 0,
        _ => 1,
    };
    Ok((report, code))
}

pub fn cmd_d0(path: &str, depth: usize) -> Result<(Report, i32), CmdError> {
    let aut = load_automaton(path)?;
    let cert = certified_nucleus(&aut)?;
    let nuc = &cert.nucleus;
    let mut report = Report::new("d0", json!({ "file": path, "depth": depth }));
    let status = d0_status(&aut, nuc, depth)?;
    let code = match &status {
        D0Status::Empty => {
            report.line("EMPTY: the singular part of the Hausdorff cover has empty interior");
            report.verdicts = json!({ "status": "EMPTY" });
            1
        }
        D0Status::NonEmpty {
            cylinder,
            members,
            sample,
        } => {
            let names = member_names(nuc, members);
            report.line(format!(
                "NONEMPTY: over cylinder {}X the union of TF({}) is dense while {} avoids all",
                cylinder,
                names.join(", "),
                sample
            ));
            report.verdicts = json!({ "status": "NONEMPTY" });
            report.certificates = json!({
                "cylinder": cylinder.to_string(),
                "members": names,
                "sample": sample.to_string(),
            });
            0
        }
        D0Status::Inconclusive => {
            report.line("INCONCLUSIVE at this depth budget");
            report.verdicts = json!({ "status": "INCONCLUSIVE" });
            1
        }
    };
    Ok((report, code))
}

pub fn cmd_regular_open(path: &str, depth: usize) -> Result<(Report, i32), CmdError> {
    let aut = load_automaton(path)?;
    let cert = certified_nucleus(&aut)?;
    let nuc = &cert.nucleus;
    let mut report = Report::new("regular-open", json!({ "file": path, "depth": depth }));
    match find_nonregular_witness(&aut, nuc, depth)? {
        NonRegularOutcome::Found(set) => {
            let verified = !regular_open(&aut, nuc, &set, depth)?;
            let cells: Vec<Value> = set
                .cells
                .iter()
                .map(|c| {
                    json!({
                        "u": c.u.to_string(),
                        "g": format!("{}", c.g.display(&aut)),
                        "v": c.v.to_string(),
                        "W": c.w.cylinders().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            report.line(format!(
                "found a compact open set with {} cell(s) that is not regular open (verified: {})",
                set.cells.len(),
                verified
            ));
            report.verdicts = json!({ "found": true, "verified": verified });
            report.certificates = json!({ "cells": cells });
            Ok((report, 0))
        }
        NonRegularOutcome::NoneCertified => {
            report.line("none: every compact open set is regular open (certified)");
            report.verdicts = json!({ "found": false, "certified": true });
            Ok((report, 1))
        }
        NonRegularOutcome::NoneAtBudget => {
            report.line("none found at this depth budget (inconclusive)");
            report.verdicts = json!({ "found": false, "certified": false });
            Ok((report, 1))
        }
    }
}

pub fn cmd_selftest(corpus: &str) -> Result<(Report, i32), CmdError> {
    let mut report = Report::new("selftest", json!({ "corpus": corpus }));
    let results = crate::selftest::run_all(corpus);
    let mut all_pass = true;
    let mut lines = Vec::new();
    for r in &results {
        let status = if r.pass { "PASS" } else { "FAIL" };
        all_pass &= r.pass;
        report.line(format!(
            "[{}] {} ({} ms){}",
            status,
            r.name,
            r.elapsed_ms,
            if r.detail.is_empty() {
                String::new()
            } else {
                format!(" — {}", r.detail)
            }
        ));
        lines.push(json!({
            "criterion": r.name,
            "pass": r.pass,
            "elapsed_ms": r.elapsed_ms,
            "detail": r.detail,
        }));
    }
    report.line(if all_pass {
        "all acceptance criteria passed"
    } else {
        "some acceptance criteria FAILED"
    });
    report.verdicts = json!({ "pass": all_pass });
    report.certificates = json!({ "criteria": lines });
    Ok((report, if all_pass { 0 } else { 1 }))
}

/// Exposed for integration tests: a compact open set built from cells of a
/// witness (used by the acceptance suite to cross-check regular_open).
pub fn witness_set(outcome: &NonRegularOutcome) -> Option<&CompactOpenSet> {
    match outcome {
        NonRegularOutcome::Found(set) => Some(set),
        _ => None,
    }
}
