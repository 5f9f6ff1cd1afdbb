//! Exact linear-relation discovery: fitting a target series in the rational
//! span of bracket series by solving the overdetermined coefficient system.
//!
//! Run with: cargo run -p qbracket --example span_fit

use qbracket::brackets::{bi_bracket, BiIndex};
use qbracket::linsys::md_span_fit;

fn main() {
    let n = 40;
    let mono = |s: &[u32]| BiIndex::mono(s.to_vec()).unwrap();

    // [2,2 \ 0,1] reduces to mono-brackets
    let target_idx = BiIndex::new(vec![2, 2], vec![0, 1]).unwrap();
    let target = bi_bracket(&target_idx, n);
    let basis = vec![mono(&[3, 2]), mono(&[2, 2, 1]), mono(&[2, 2])];
    let fit = md_span_fit(&target, &basis, n).unwrap();
    print_fit(&format!("{target_idx}"), &fit.combination);

    // q d/dq [2] lies in the span of mono-brackets of weight <= 4
    let dq2 = bi_bracket(&mono(&[2]), n).q_d_dq();
    let basis: Vec<BiIndex> = all_monos_up_to(4);
    let fit = md_span_fit(&dq2, &basis, n).unwrap();
    print_fit("d_q [2]", &fit.combination);

    // a series outside the span is reported as such
    let q = qbracket::QSeries::monomial(qbracket::Rat::one(), 1, n);
    let fit = md_span_fit(&q, &basis, n).unwrap();
    println!(
        "bare q in the mono span: {}",
        if fit.combination.is_none() { "no" } else { "yes" }
    );
}

fn print_fit(label: &str, combination: &Option<Vec<(BiIndex, qbracket::Rat)>>) {
    match combination {
        None => println!("{label}: not in the span"),
        Some(combo) => {
            let parts: Vec<String> = combo
                .iter()
                .map(|(idx, c)| format!("{c}*{idx}"))
                .collect();
            println!("{label} = {}", parts.join(" + "));
        }
    }
}

fn all_monos_up_to(max_weight: u32) -> Vec<BiIndex> {
    let mut out = Vec::new();
    fn rec(rem: u32, cur: &mut Vec<u32>, out: &mut Vec<BiIndex>) {
        if !cur.is_empty() {
            out.push(BiIndex::mono(cur.clone()).unwrap());
        }
        if rem == 0 {
            return;
        }
        for v in 1..=rem {
            cur.push(v);
            rec(rem - v, cur, out);
            cur.pop();
        }
    }
    rec(max_weight, &mut Vec::new(), &mut out);
    out
}
