//! The generating-function route to the odd-weight theorem: the length-2
//! generating polynomial equals half a six-term combination of product
//! generating polynomials, modulo length-1 brackets, coefficient by
//! coefficient.
//!
//! Run with: cargo run -p qbracket --example generating_identity

use qbracket::linsys::generating_identity_check;

fn main() {
    for (s, r) in [(2u32, 1u32), (3, 0), (3, 2)] {
        let ok = generating_identity_check(s, r, 40).unwrap();
        println!("generating identity at (S, R) = ({s}, {r}): {}", ok);
    }
    // even total weight is outside the theorem's hypothesis
    match generating_identity_check(3, 1, 40) {
        Err(e) => println!("(3, 1) rejected: {e}"),
        Ok(_) => unreachable!(),
    }
}
