//! Compute the CHSH violation surface over the (xi, V) rectangle and print
//! a coarse ASCII rendering plus a few exact slices.
//!
//! Run with: `cargo run --example fig1_surface`

use bellclone::certify::fig1_surface;

fn main() -> bellclone::Result<()> {
    let (res_xi, res_v) = (21usize, 21usize);
    let surface = fig1_surface(res_xi, res_v)?;

    // Rows are xi (top = pi), columns are V (left = 0). Darker glyphs mean
    // a larger maximal CHSH value; '.' marks the non-violating boundary.
    let glyphs = [b'.', b'-', b'+', b'*', b'#'];
    let sqrt2 = 2.0f64.sqrt();
    println!("max CHSH value, xi down / V across (peak {sqrt2:.4}):");
    for i in (0..res_xi).rev() {
        let mut row = Vec::with_capacity(res_v);
        for j in 0..res_v {
            let value = surface[i * res_v + j].chsh_value;
            let t = ((value - 1.0) / (sqrt2 - 1.0)).clamp(0.0, 1.0);
            let k = ((t * (glyphs.len() - 1) as f64).round()) as usize;
            row.push(glyphs[k]);
        }
        println!("  {}", String::from_utf8(row).expect("ascii"));
    }

    println!("\nV = 1 slice:");
    for j in [0usize, 5, 10, 15, 20] {
        let p = &surface[j * res_v + (res_v - 1)];
        println!("  xi = {:.4}  value = {:.12}", p.xi, p.chsh_value);
    }
    Ok(())
}
