//! End-to-end acceptance gate: every numbered check must pass at its
//! documented tolerance. One line is printed per check; run with
//! `cargo test --test acceptance -- --nocapture` to see all of them.

use r2kit_core::verify::{run_all, CHECK_COUNT};

#[test]
fn all_checks_pass() {
    let results = run_all(42, 1);
    assert_eq!(results.len(), CHECK_COUNT);
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.to_string())
        .collect();
    assert!(failed.is_empty(), "failing checks:\n{}", failed.join("\n"));
}
