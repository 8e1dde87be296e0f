//! The acceptance suite as a test target: runs every criterion over the
//! bundled corpus and prints one pass/fail line per criterion.

use ssg_cli::selftest;

fn corpus_dir() -> String {
    format!("{}/../../corpus", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn acceptance_criteria() {
    let results = selftest::run_all(&corpus_dir());
    let mut all_pass = true;
    for r in &results {
        println!(
            "[{}] {} ({} ms) — {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.elapsed_ms,
            r.detail
        );
        all_pass &= r.pass;
    }
    assert!(all_pass, "some acceptance criteria failed (see lines above)");
    assert_eq!(results.len(), 9, "expected nine criteria");
}
