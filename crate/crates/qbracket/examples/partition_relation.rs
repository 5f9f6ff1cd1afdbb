//! The partition relation: the involution on bi-bracket words induced by
//! conjugating the underlying partitions, at any length.
//!
//! Run with: cargo run -p qbracket --example partition_relation

use qbracket::bialgebra::{partition, partition_lincomb, BiWord, Letter, LinComb};
use qbracket::brackets::{bi_bracket, evaluate, BiIndex};

fn main() {
    // length 1: a plain swap [s \ r] = [r+1 \ s-1]
    let w = BiWord::letter(5, 2);
    println!("P({w}) = {}", partition(&w).unwrap());

    // length 2 worked examples
    for letters in [
        vec![Letter::new(3, 1), Letter::new(1, 0)],
        vec![Letter::new(2, 1), Letter::new(2, 1)],
    ] {
        let w = BiWord::new(letters);
        println!("P({w}) = {}", partition(&w).unwrap());
    }

    // length 3 comes from the same generating-function substitution
    let w = BiWord::new(vec![Letter::new(2, 1), Letter::new(1, 0), Letter::new(1, 1)]);
    let p = partition(&w).unwrap();
    println!("P({w}) = {p}");

    // P is an involution ...
    println!(
        "\nP(P(w)) == w: {}",
        partition_lincomb(&p) == LinComb::from_word(w.clone())
    );

    // ... and the bracket evaluation is invariant under it
    let n = 30;
    let lhs = bi_bracket(&BiIndex::from_word(&w).unwrap(), n);
    let rhs = evaluate(&p, n);
    println!("[w] == [P(w)] as series at N = {n}: {}", lhs == rhs);
}
