//! The derivation q d/dq on brackets, and the reduction of every length-1
//! bi-bracket to a constant times a power of it applied to a mono-bracket.
//!
//! Run with: cargo run -p qbracket --example derivation_towers

use qbracket::brackets::{bi_bracket, d_q_symbolic, evaluate, length1_reduce, BiIndex};

fn main() {
    // q d/dq acts on a bi-bracket as a length-preserving combination
    for (s, r) in [(vec![2u32], vec![0u32]), (vec![3, 1], vec![2, 0])] {
        let idx = BiIndex::new(s, r).unwrap();
        println!("d_q {idx} = {}", d_q_symbolic(&idx));
    }

    // the symbolic action matches the coefficientwise derivative
    let idx = BiIndex::new(vec![2, 1], vec![1, 0]).unwrap();
    let n = 30;
    let symbolic = evaluate(&d_q_symbolic(&idx), n);
    let direct = bi_bracket(&idx, n).q_d_dq();
    println!("series check at {idx}: {}", symbolic == direct);

    // every [s \ r] is C * d_q^p [m]; when s <= r the partition swap
    // [s \ r] = [r+1 \ s-1] is applied first
    println!();
    for (s, r) in [(3u32, 0u32), (3, 1), (1, 2), (4, 3), (2, 5)] {
        let tower = length1_reduce(s, r).unwrap();
        println!(
            "[{s}\\{r}] = {} * d_q^{} [{}]   (verified: {})",
            tower.constant,
            tower.power,
            tower.base,
            tower.evaluate(n) == bi_bracket(&BiIndex::new(vec![s], vec![r]).unwrap(), n)
        );
    }
}
