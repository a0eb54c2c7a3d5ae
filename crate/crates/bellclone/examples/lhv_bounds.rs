//! Prove the classical bound of each inequality family by exhaustive
//! enumeration of deterministic local-hidden-variable strategies.
//!
//! Run with: `cargo run --release --example lhv_bounds`

use bellclone::bell::{chsh_spec, even_spec, lhv_max, odd_spec, InequalitySpec};

fn report(name: &str, spec: &InequalitySpec) -> bellclone::Result<()> {
    let bound = lhv_max(spec)?;
    println!(
        "{name:10}  bound = {:>4}/2^{:<2} = {}  ({} strategies, argmax mask {:#x})",
        bound.value.num,
        bound.value.den_pow2,
        bound.value.to_f64(),
        bound.strategies_searched,
        bound.strategy_mask,
    );
    Ok(())
}

fn main() -> bellclone::Result<()> {
    report("chsh", &chsh_spec())?;
    for n in [2usize, 4, 6] {
        report(&format!("even n={n}"), &even_spec(n)?)?;
    }
    for n in [3usize, 5] {
        report(&format!("odd n={n}"), &odd_spec(n)?)?;
    }

    // The specs serialize to a portable JSON document, so external
    // inequalities can be checked the same way (see `bellclone lhv-bound --spec`).
    let doc = serde_json::to_string_pretty(&even_spec(2)?).expect("serializable");
    println!("\neven n=2 as JSON:\n{doc}");
    Ok(())
}
