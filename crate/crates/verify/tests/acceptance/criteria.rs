use laguerre_edge_verify::{run_criterion, Tolerances};

fn check(id: u8) {
    let _guard = crate::serial();
    let report = run_criterion(id, &Tolerances::embedded()).expect("criterion ran");
    crate::report_line(report.pass, &format!("criterion {} ({})", report.id, report.name), &report.detail, report.elapsed_s);
    assert!(report.pass, "{report}");
}

#[test]
fn criterion_1_oracle_equivalence() {
    check(1);
}

#[test]
fn criterion_2_geometry_identities() {
    check(2);
}

#[test]
fn criterion_3_clt_desk_scale() {
    check(3);
}

#[test]
fn criterion_4_variance_lemma() {
    check(4);
}

#[test]
fn criterion_5_a0_sum_lemma() {
    check(5);
}

#[test]
fn criterion_6_uniform_r_bound() {
    check(6);
}

#[test]
fn criterion_7_marchenko_pastur_bulk() {
    check(7);
}

#[test]
fn criterion_8_sub_gamma_tails() {
    check(8);
}

#[test]
fn criterion_9_determinism_across_workers() {
    check(9);
}
