//! The structured matrices of the odd-weight theorem: P, Q, J, the
//! reflections, the reduced Kronecker system and its closed-form inverse.
//!
//! Run with: cargo run -p qbracket --example odd_weight_matrices

use qbracket::linsys::{
    inverse_formula, j_matrix, p_matrix, q_matrix, reduced_system, rho, sigma, verify_inverse,
    RatMatrix,
};

fn main() {
    let n = 4;
    println!("P_{n} =\n{}", p_matrix(n));
    println!("Q_{n} =\n{}", q_matrix(n));
    println!("J_{n} =\n{}", j_matrix(n));
    println!(
        "P_{n} Q_{n} = I: {}",
        p_matrix(n).mul(&q_matrix(n)) == RatMatrix::identity(n)
    );
    let refl = sigma(&rho(&p_matrix(n)).unwrap()).unwrap();
    println!("\nP_{n} reflected (rho then sigma) =\n{refl}");

    // the reduced system at (S, R) = (3, 2) and its closed-form inverse
    let t = reduced_system(3, 2);
    println!("reduced system at (3,2) =\n{t}");
    let v = inverse_formula(3, 2);
    println!("closed-form inverse =\n{v}");
    println!("product is the identity: {}", t.mul(&v) == RatMatrix::identity(6));

    // the inverse exists exactly when S + R is odd
    println!();
    for s in 2..=7u32 {
        let row: Vec<String> = (0..=6u32)
            .map(|r| if verify_inverse(s, r) { "ok".into() } else { ".".to_string() })
            .collect();
        println!("S = {s}: {}", row.join("  "));
    }
    println!("(ok = inverse formula verified; rows S, columns R = 0..6)");
}
