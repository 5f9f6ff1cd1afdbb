//! The deficiency table lambda(S, R) = (S-1)(R+1) - rank of the full
//! stuffle-and-shuffle system. Zero exactly at odd S + R, where the system
//! determines every length-2 bi-bracket.
//!
//! Run with: cargo run -p qbracket --example lambda_table

use rayon::prelude::*;

use qbracket::linsys::lambda_deficiency;

fn main() {
    let s_max = 8u32;
    let r_max = 6u32;
    let cells: Vec<(u32, u32)> = (2..=s_max)
        .flat_map(|s| (0..=r_max).map(move |r| (s, r)))
        .collect();
    let table: std::collections::BTreeMap<(u32, u32), usize> = cells
        .par_iter()
        .map(|&(s, r)| ((s, r), lambda_deficiency(s, r).unwrap()))
        .collect();

    let header: Vec<String> = (0..=r_max).map(|r| format!("R={r}")).collect();
    println!("S\\R\t{}", header.join("\t"));
    for s in 2..=s_max {
        let row: Vec<String> = (0..=r_max).map(|r| table[&(s, r)].to_string()).collect();
        println!("{s}\t{}", row.join("\t"));
    }

    // the deficiency is symmetric under the partition relation,
    // lambda(S, R) = lambda(R+2, S-2)
    println!();
    for (s, r) in [(5u32, 1u32), (2, 4), (7, 1)] {
        println!(
            "lambda({s},{r}) = {} = lambda({},{}) = {}",
            table[&(s, r)],
            r + 2,
            s - 2,
            lambda_deficiency(r + 2, s - 2).unwrap()
        );
    }

    // the reduced Kronecker system has its own kernel, reported separately
    // from lambda (no relation between the two is asserted)
    println!();
    for (s, r) in [(3u32, 1u32), (4, 2), (5, 3)] {
        println!(
            "dim ker reduced_system({s},{r}) = {}   (lambda({s},{r}) = {})",
            qbracket::linsys::reduced_system(s, r).kernel_dim(),
            table[&(s, r)]
        );
    }
}
