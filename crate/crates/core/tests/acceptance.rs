//! Acceptance gate. Each test runs one of the nine self checks and prints
//! a single verdict line; run with `-- --nocapture` to see the lines for
//! passing checks too.

use bramble_core::harness::checks;

fn run(want: usize) {
    let (n, label, f) = checks()[want - 1];
    assert_eq!(n, want, "check table out of order");
    match f() {
        Ok(note) => println!("criterion {n} ({label}): PASS - {note}"),
        Err(e) => {
            println!("criterion {n} ({label}): FAIL - {e}");
            panic!("criterion {n} ({label}) failed: {e}");
        }
    }
}

#[test]
fn criterion_1_threading_overlap_and_concatenation() {
    run(1);
}

#[test]
fn criterion_2_refinement_dichotomy() {
    run(2);
}

#[test]
fn criterion_3_crossing_congestion_table() {
    run(3);
}

#[test]
fn criterion_4_bipartite_partition_clauses() {
    run(4);
}

#[test]
fn criterion_5_scenario_congestion_bounds() {
    run(5);
}

#[test]
fn criterion_6_case_counting_inequality() {
    run(6);
}

#[test]
fn criterion_7_parameter_chain_arithmetic() {
    run(7);
}

#[test]
fn criterion_8_end_to_end_smoke() {
    run(8);
}

#[test]
fn criterion_9_oracle_agreement() {
    run(9);
}
