//! The q-multiple zeta model: exact series, the dual index, the sum-duality
//! S_q(s; c) = S_q(s-dual; c) (whose limit is Ohno's relations), and the
//! q-stuffle homomorphism.
//!
//! Run with: cargo run -p qbracket --example q_duality

use qbracket::qmzv::{dual, ohno_q_check, q_stuffle, s_q, verify_q_stuffle, zeta_q, MZIndex};

fn main() {
    let idx = |parts: &[u32]| MZIndex::new(parts.to_vec()).unwrap();

    for parts in [vec![2u32], vec![3], vec![2, 1], vec![4, 1]] {
        let i = idx(&parts);
        println!("zeta_q{i} = {}", zeta_q(&i, 12).unwrap());
    }

    // duals via block reversal
    println!();
    for parts in [vec![4u32, 1], vec![3, 2, 2], vec![2, 1, 1]] {
        let i = idx(&parts);
        println!("dual{i} = {}", dual(&i).unwrap());
    }

    // plain duality is the c = 0 case of the sum duality
    let n = 40;
    let i = idx(&[3]);
    let d = dual(&i).unwrap();
    println!(
        "\nzeta_q(3) == zeta_q(2,1) exactly at N = {n}: {}",
        zeta_q(&i, n).unwrap() == zeta_q(&d, n).unwrap()
    );

    // the weighted sums S_q(s; c) agree with their duals for every c
    for c in 0..=3 {
        println!(
            "S_q((3); {c}) == S_q((2,1); {c}): {}",
            s_q(&i, c, n).unwrap() == s_q(&d, c, n).unwrap()
        );
    }
    println!(
        "ohno_q_check((4,1), 2, {n}) = {}",
        ohno_q_check(&idx(&[4, 1]), 2, n).unwrap()
    );

    // the q-stuffle carries (1-q)-weighted merge terms
    println!("\ny2 *_q y2:");
    for (word, poly) in q_stuffle(&[2], &[2]) {
        let parts: Vec<String> = word.iter().map(u32::to_string).collect();
        let coeffs: Vec<String> = poly.coeffs().iter().map(|c| c.to_string()).collect();
        println!("  y({})  coefficient polynomial in q: [{}]", parts.join(","), coeffs.join(", "));
    }
    println!(
        "q-stuffle homomorphism for zeta_q at ((2),(2,1)): {}",
        verify_q_stuffle(&idx(&[2]), &idx(&[2, 1]), 30).unwrap()
    );
}
