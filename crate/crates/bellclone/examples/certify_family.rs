//! Certify that perfect 1->n cloning is impossible: for each party count
//! the matching inequality family is maximized over its witness angle and
//! the quantum value is compared against the classical bound of 1.
//!
//! Run with: `cargo run --example certify_family`

use std::f64::consts::PI;

use bellclone::certify::{
    certify_no_cloning, theorem1_threshold, theorem2_threshold, InequalityKind,
};

fn main() -> bellclone::Result<()> {
    let v = 0.8;
    let xi = PI / 3.0;
    println!("certifying at V = {v}, xi = pi/3:\n");

    for n in 2usize..=7 {
        let report = certify_no_cloning(n, v, xi)?;
        let threshold = match report.inequality_kind {
            InequalityKind::Chsh => 2.0 * (v * xi.sin()).atan(),
            InequalityKind::EvenN => theorem1_threshold(n, v, xi),
            InequalityKind::OddN => theorem2_threshold(n, v, xi),
        };
        println!(
            "n={n}  {:?}  value = {:.12}  witness theta11 = {:.6}  (violation interval ends at {threshold:.6})  violated = {}",
            report.inequality_kind, report.value, report.witness_theta11, report.violated
        );
    }

    // Degenerate states never violate: the report is still well-formed.
    let flat = certify_no_cloning(4, 0.0, PI / 3.0)?;
    println!(
        "\nV = 0 control: value = {}, violated = {}",
        flat.value, flat.violated
    );
    Ok(())
}
