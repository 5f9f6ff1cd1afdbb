//! Solving the stuffle-and-shuffle system: every length-2 bi-bracket of odd
//! total weight as an exact combination of length-1 products and length-1
//! brackets, verified coefficientwise as q-series.
//!
//! Run with: cargo run -p qbracket --example solve_relations

use qbracket::linsys::solve_length2;

fn main() {
    // the worked upper weight 3, lower weight 2 block
    println!("relations at (S, R) = (3, 2), each verified as a series at N = 40:\n");
    for (word, relation) in solve_length2(3, 2, 40).unwrap() {
        println!("{word} = {relation}");
    }

    // upper weight 5, lower weight 0: the parity relations for mono-brackets
    println!("\nrelations at (S, R) = (5, 0):\n");
    for (word, relation) in solve_length2(5, 0, 40).unwrap() {
        println!("{word} = {relation}");
    }

    // even total weight has a rank-deficient system
    match solve_length2(3, 1, 30) {
        Err(e) => println!("\n(3, 1) is unsolvable as expected: {e}"),
        Ok(_) => unreachable!("even total weight must fail"),
    }
}
