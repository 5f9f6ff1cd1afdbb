//! Multiple harmonic sums: the exact finite-N stuffle law, numeric MZV
//! estimates with rigorous rational tail bounds, and the combined
//! shuffle-stuffle relation on words.
//!
//! Run with: cargo run -p qbracket --example harmonic_sums

use qbracket::arith::Rat;
use qbracket::qmzv::{
    harmonic_sum, harmonic_sum_lincomb, hoffman_check, hoffman_difference, mzv_estimate,
    stuffle_y, BinWord, MZIndex,
};

fn main() {
    // H(1; 3) = 1 + 1/2 + 1/3
    println!("H(1;3) = {}", harmonic_sum(&[1], 3));

    // the stuffle law holds at every finite cutoff, exactly
    let v = [2u32];
    let w = [2u32, 1];
    let product = stuffle_y(&v, &w);
    for n in [5u64, 12, 30] {
        let lhs = harmonic_sum(&v, n) * harmonic_sum(&w, n);
        let rhs = harmonic_sum_lincomb(&product, n);
        println!("H(2;{n}) H(2,1;{n}) == H(stuffle; {n}): {}", lhs == rhs);
    }

    // numeric MZV estimates carry provable tail bounds
    let idx = |parts: &[u32]| MZIndex::new(parts.to_vec()).unwrap();
    let n = 10_000u64;
    let (v21, b21) = mzv_estimate(&idx(&[2, 1]), n).unwrap();
    let (v3, b3) = mzv_estimate(&idx(&[3]), n).unwrap();
    println!("\nH(2,1;10^4) = {}...", v21.to_decimal(15));
    println!("H(3;10^4)   = {}...", v3.to_decimal(15));
    let diff = (v21 - v3).abs();
    let budget = b21 + b3;
    println!(
        "|difference| = {} <= summed tail bounds {}: {}",
        diff.to_decimal(15),
        budget.to_decimal(15),
        diff <= budget
    );

    // x1 sh w - x1 * w survives only on admissible words and sums to zero
    let w = BinWord::from_index(&idx(&[3]));
    println!("\nhoffman difference for {w}:");
    for (word, c) in hoffman_difference(&w).unwrap() {
        let parts: Vec<String> = word.iter().map(u32::to_string).collect();
        let sign = if c == Rat::one() { "+".into() } else { c.to_string() };
        println!("  {sign} zeta({})", parts.join(","));
    }
    println!(
        "numeric check at N = 2000: {}",
        hoffman_check(&w, 2000).unwrap()
    );
}
