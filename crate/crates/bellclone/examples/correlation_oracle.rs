//! Compare the closed-form correlation against the density-matrix oracle
//! for randomly drawn states and measurement directions.
//!
//! Run with: `cargo run --example correlation_oracle`

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bellclone::correlators::{
    correlation_closed_form, correlation_oracle, Direction, PartyChoice,
};
use bellclone::qstate::{materialize_density, CatParams, NoisyCloneSpec};

fn main() -> bellclone::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;

    for n in 2usize..=5 {
        for trial in 0..3 {
            let xi = rng.gen_range(0.0..PI);
            let phi = rng.gen_range(0.0..2.0 * PI);
            let v = rng.gen_range(0.0..=1.0);
            let state = NoisyCloneSpec::new(n, CatParams::new(xi, phi)?, v)?;

            // Measure every party except, on the last trial, party n: a
            // NoMeasurement slot contracts that qubit with the identity.
            let choices: Vec<PartyChoice> = (0..n)
                .map(|p| {
                    if trial == 2 && p == n - 1 {
                        PartyChoice::NoMeasurement
                    } else {
                        PartyChoice::Measure(Direction::normalized(
                            rng.gen_range(0.0..PI),
                            rng.gen_range(0.0..2.0 * PI),
                        ))
                    }
                })
                .collect();

            let fast = correlation_closed_form(&state, &choices)?;
            let slow = correlation_oracle(&materialize_density(&state)?, &choices)?;
            let diff = (fast - slow).abs();
            worst = worst.max(diff);
            println!(
                "n={n} trial={trial}  closed={fast:+.12}  oracle={slow:+.12}  |diff|={diff:.2e}"
            );
        }
    }

    println!("\nworst disagreement over all trials: {worst:.2e}");
    Ok(())
}
