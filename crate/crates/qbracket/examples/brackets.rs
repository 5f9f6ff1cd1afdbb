//! Evaluating mono- and bi-brackets as exact truncated q-series.
//!
//! Run with: cargo run -p qbracket --example brackets

use qbracket::brackets::{bi_bracket, mono_bracket, BiIndex};

fn main() {
    // mono-brackets: nested divisor-power sums
    for s in [vec![1u32], vec![2], vec![2, 1], vec![4, 3, 2, 1]] {
        let series = mono_bracket(&s, 12).unwrap();
        println!("[{}] = {series}", join(&s));
    }

    // the coefficients of [1] count divisors
    let b1 = mono_bracket(&[1], 12).unwrap();
    let divisor_counts: Vec<String> = (1..=12)
        .map(|n| b1.coeff(n).to_string())
        .collect();
    println!("\ncoefficients of [1] = divisor counts d(1..12): {}", divisor_counts.join(", "));

    // bi-brackets carry a second row of indices weighting the parts
    println!();
    for (s, r) in [
        (vec![1u32, 1u32], vec![1u32, 0u32]),
        (vec![2, 2], vec![1, 1]),
        (vec![2, 1], vec![1, 3]),
    ] {
        let idx = BiIndex::new(s, r).unwrap();
        println!("{idx} = {}", bi_bracket(&idx, 9));
    }

    // series serialize to JSON with rationals as exact strings
    let idx = BiIndex::new(vec![2], vec![1]).unwrap();
    let json = serde_json::to_string(&bi_bracket(&idx, 6)).unwrap();
    println!("\n{idx} as JSON: {json}");
}

fn join(parts: &[u32]) -> String {
    parts
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(",")
}
