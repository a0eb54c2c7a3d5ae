//! Build a cat state, run it through the symmetric cloning map, add noise,
//! and inspect the resulting density matrices.
//!
//! Run with: `cargo run --example cat_and_clones`

use std::f64::consts::PI;

use bellclone::qstate::{
    bloch_vector, make_cat_state, materialize_density, tensor_power, trace_distance, CatParams,
    NoisyCloneSpec,
};

fn main() -> bellclone::Result<()> {
    // |psi> = cos(xi/2)|0> + e^{i phi} sin(xi/2)|1>
    let cat = CatParams::new(PI / 3.0, PI / 4.0)?;
    let psi = make_cat_state(&cat);
    println!("cat state (xi = pi/3, phi = pi/4):");
    for (k, a) in psi.amplitudes().iter().enumerate() {
        println!("  |{k}>  {:.6} {:+.6}i", a.re, a.im);
    }

    // The cloning map sends it to cos(xi/2)|00..0> + e^{i phi} sin(xi/2)|11..1>,
    // so only the two corner amplitudes survive.
    let spec3 = NoisyCloneSpec::new(3, cat, 0.9)?;
    let rho3 = materialize_density(&spec3)?;
    println!("\n3-clone state at V = 0.9:");
    println!("  dim           = {}", rho3.dim());
    println!("  purity        = {:.6}", rho3.purity());
    println!("  min eigenvalue = {:+.3e}", rho3.min_eigenvalue());

    // A single noisy copy is a Bloch vector of length V ...
    let single = materialize_density(&NoisyCloneSpec::new(1, cat, 0.9)?)?;
    let r = bloch_vector(&single)?;
    let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    println!("\nsingle copy Bloch vector: ({:+.4}, {:+.4}, {:+.4}), |r| = {norm:.6}", r[0], r[1], r[2]);

    // ... and two genuine clones are measurably different from two
    // independent copies: the trace distance stays bounded away from zero.
    let pair = materialize_density(&NoisyCloneSpec::new(2, cat, 0.9)?)?;
    let product = tensor_power(&single, 2)?;
    let d = trace_distance(&pair, &product)?;
    println!("trace distance between 2 clones and copy x copy: {d:.6}");

    Ok(())
}
