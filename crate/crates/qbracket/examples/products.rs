//! The stuffle and shuffle products of bi-bracket words, and the exact
//! series homomorphism both satisfy.
//!
//! Run with: cargo run -p qbracket --example products

use qbracket::bialgebra::{shuffle, stuffle, BiWord, LinComb};
use qbracket::brackets::{evaluate, BiIndex};

fn main() {
    let z = |s, r| LinComb::from_word(BiWord::letter(s, r));

    // the classical square of [2]: 2[2,2] + [4] - 1/6 [2]
    println!("z(2,0) * z(2,0)  = {}", stuffle(&z(2, 0), &z(2, 0)));

    // a worked pair at upper weight 3, lower weight 2
    println!("z(2,2) * z(1,0)  = {}", stuffle(&z(2, 2), &z(1, 0)));
    println!("z(2,2) sh z(1,0) = {}", shuffle(&z(2, 2), &z(1, 0)));

    // shuffling two mono letters produces exactly one word with a nonzero
    // lower index
    println!("z(3,0) sh z(2,0) = {}", shuffle(&z(3, 0), &z(2, 0)));

    // both products evaluate to the same series product
    let n = 25;
    let v = z(2, 1);
    let w = z(1, 1);
    let product = {
        let a = evaluate(&v, n);
        let b = evaluate(&w, n);
        &a * &b
    };
    let via_stuffle = evaluate(&stuffle(&v, &w), n);
    let via_shuffle = evaluate(&shuffle(&v, &w), n);
    println!("\n[2\\1] * [1\\1] as a series      = {product}");
    println!("stuffle expansion evaluates equal: {}", via_stuffle == product);
    println!("shuffle expansion evaluates equal: {}", via_shuffle == product);

    // longer words work the same way
    let long = LinComb::from_word(
        BiIndex::new(vec![2, 1], vec![0, 1]).unwrap().to_word(),
    );
    let st = stuffle(&long, &z(2, 0));
    println!("\nz(2,0)z(1,1) * z(2,0) has {} terms", st.num_terms());
    println!(
        "homomorphism still exact: {}",
        evaluate(&st, n) == &evaluate(&long, n) * &evaluate(&z(2, 0), n)
    );
}
