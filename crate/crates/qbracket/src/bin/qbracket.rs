//! Thin command-line frontend over the qbracket library. Everything here
//! delegates to library calls; the examples/ directory shows the same
//! functionality as library code.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use qbracket::brackets::{bi_bracket, BiIndex};
use qbracket::linsys::{lambda_deficiency, md_span_fit, solve_length2};
use qbracket::qmzv::{dual, zeta_q, MZIndex};
use qbracket::verify::{run_suite, SuiteReport, SUITE_NAMES};
use qbracket::{partition, shuffle, stuffle, LinComb, QbracketError};

#[derive(Parser)]
#[command(
    name = "qbracket",
    about = "Exact q-series for mono- and bi-brackets, their product algebras, and the odd-weight linear systems",
    version
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Worker threads for parallel sweeps (0 = all cores).
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a bi-bracket as a truncated q-series.
    Bracket {
        /// Comma-separated upper indices, e.g. --s 2,1
        #[arg(long, required = true)]
        s: String,
        /// Comma-separated lower indices (defaults to all zeros).
        #[arg(long)]
        r: Option<String>,
        #[arg(short = 'N', long = "precision", env = "QBRACKET_PRECISION", default_value_t = 40)]
        precision: usize,
    },
    /// Evaluate a mono-bracket (all lower indices zero).
    Mono {
        #[arg(long, required = true)]
        s: String,
        #[arg(short = 'N', long = "precision", env = "QBRACKET_PRECISION", default_value_t = 40)]
        precision: usize,
    },
    /// Stuffle or shuffle product of two words, as a linear combination.
    Product {
        /// Use the stuffle product.
        #[arg(long, conflicts_with = "shuffle")]
        stuffle: bool,
        /// Use the shuffle product.
        #[arg(long)]
        shuffle: bool,
        /// First word, written s1,s2/r1,r2 (mono words may omit /r).
        left: String,
        /// Second word, same syntax.
        right: String,
    },
    /// Apply the partition relation to a word.
    Partition {
        #[arg(long, required = true)]
        s: String,
        #[arg(long)]
        r: Option<String>,
    },
    /// Solve for all length-2 bi-brackets at odd S + R, with verification.
    Solve {
        /// Upper weight S >= 2.
        upper: u32,
        /// Lower weight R >= 0.
        lower: u32,
        #[arg(short = 'N', long = "precision", env = "QBRACKET_PRECISION", default_value_t = 40)]
        precision: usize,
    },
    /// Table of rank deficiencies lambda(S, R) of the full system.
    LambdaTable {
        #[arg(long, default_value_t = 8)]
        s_max: u32,
        #[arg(long, default_value_t = 6)]
        r_max: u32,
    },
    /// Evaluate a q-multiple zeta value as a truncated series.
    ZetaQ {
        #[arg(long, required = true)]
        s: String,
        #[arg(short = 'N', long = "precision", env = "QBRACKET_PRECISION", default_value_t = 40)]
        precision: usize,
    },
    /// The dual of an admissible index.
    Dual {
        #[arg(long, required = true)]
        s: String,
    },
    /// Exact fit of a bi-bracket in the span of a bracket basis.
    SpanFit {
        /// Target upper indices.
        #[arg(long, required = true)]
        s: String,
        /// Target lower indices (defaults to all zeros).
        #[arg(long)]
        r: Option<String>,
        /// Basis words, space separated, each written s1,s2/r1,r2.
        #[arg(long, num_args = 1.., value_delimiter = ' ', conflicts_with = "mono_weight")]
        basis: Option<Vec<String>>,
        /// Use all mono-brackets of weight at most this as the basis.
        #[arg(long)]
        mono_weight: Option<u32>,
        #[arg(short = 'N', long = "precision", env = "QBRACKET_PRECISION", default_value_t = 40)]
        precision: usize,
    },
    /// Run a verification suite ("all" for every suite).
    Verify {
        /// One of the suite names, or "all".
        suite: String,
    },
}

fn parse_u32_list(text: &str) -> Result<Vec<u32>, QbracketError> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<u32>()
                .map_err(|_| QbracketError::Parse(format!("invalid index list: {text:?}")))
        })
        .collect()
}

fn parse_index(s: &str, r: Option<&str>) -> Result<BiIndex, QbracketError> {
    let s = parse_u32_list(s)?;
    let r = match r {
        Some(text) => parse_u32_list(text)?,
        None => vec![0; s.len()],
    };
    BiIndex::new(s, r)
}

/// Word syntax: "s1,s2/r1,r2" or "s1,s2\r1,r2"; a mono word omits the lower
/// part.
fn parse_word(text: &str) -> Result<BiIndex, QbracketError> {
    let (s_part, r_part) = match text.split_once(['/', '\\']) {
        Some((a, b)) => (a, Some(b)),
        None => (text, None),
    };
    parse_index(s_part, r_part)
}

fn print_series(ser: &qbracket::QSeries, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(ser).unwrap()),
        Format::Text | Format::Tsv => {
            if ser.is_zero() {
                println!("0");
            } else {
                println!("{ser}");
            }
        }
    }
}

fn print_lincomb(lc: &LinComb, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(lc).unwrap()),
        Format::Text | Format::Tsv => println!("{lc}"),
    }
}

fn run(cli: Cli) -> Result<bool, QbracketError> {
    match cli.command {
        Command::Bracket { s, r, precision } => {
            let idx = parse_index(&s, r.as_deref())?;
            print_series(&bi_bracket(&idx, precision), cli.format);
            Ok(true)
        }
        Command::Mono { s, precision } => {
            let idx = parse_index(&s, None)?;
            print_series(&bi_bracket(&idx, precision), cli.format);
            Ok(true)
        }
        Command::Product {
            stuffle: use_stuffle,
            shuffle: use_shuffle,
            left,
            right,
        } => {
            if use_stuffle == use_shuffle {
                return Err(QbracketError::Parse(
                    "pick exactly one of --stuffle / --shuffle".into(),
                ));
            }
            let lv = LinComb::from_word(parse_word(&left)?.to_word());
            let lw = LinComb::from_word(parse_word(&right)?.to_word());
            let out = if use_stuffle {
                stuffle(&lv, &lw)
            } else {
                shuffle(&lv, &lw)
            };
            print_lincomb(&out, cli.format);
            Ok(true)
        }
        Command::Partition { s, r } => {
            let idx = parse_index(&s, r.as_deref())?;
            let out = partition(&idx.to_word())?;
            print_lincomb(&out, cli.format);
            Ok(true)
        }
        Command::Solve {
            upper,
            lower,
            precision,
        } => {
            let relations = solve_length2(upper, lower, precision)?;
            match cli.format {
                Format::Json => {
                    let items: Vec<serde_json::Value> = relations
                        .iter()
                        .map(|(word, rel)| {
                            let products: Vec<serde_json::Value> = rel
                                .products
                                .iter()
                                .map(|((a, b), c)| {
                                    json!({
                                        "coeff": c.to_string(),
                                        "left": {"s": [a.s], "r": [a.r]},
                                        "right": {"s": [b.s], "r": [b.r]},
                                    })
                                })
                                .collect();
                            json!({
                                "word": {
                                    "s": word.letters().iter().map(|l| l.s).collect::<Vec<_>>(),
                                    "r": word.letters().iter().map(|l| l.r).collect::<Vec<_>>(),
                                },
                                "products": products,
                                "length1": serde_json::to_value(&rel.length1).unwrap(),
                                "verified_at": precision,
                            })
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&items).unwrap());
                }
                Format::Text | Format::Tsv => {
                    for (word, rel) in &relations {
                        println!("{word} = {rel}   (verified as series at N = {precision})");
                    }
                }
            }
            Ok(true)
        }
        Command::LambdaTable { s_max, r_max } => {
            use rayon::prelude::*;
            let mut cells: Vec<(u32, u32)> = Vec::new();
            for s in 2..=s_max {
                for r in 0..=r_max {
                    cells.push((s, r));
                }
            }
            let computed: Vec<((u32, u32), usize)> = cells
                .par_iter()
                .map(|&(s, r)| ((s, r), lambda_deficiency(s, r).expect("S >= 2")))
                .collect();
            let lookup: std::collections::BTreeMap<(u32, u32), usize> =
                computed.into_iter().collect();
            match cli.format {
                Format::Json => {
                    let cells: Vec<serde_json::Value> = lookup
                        .iter()
                        .map(|(&(s, r), &l)| json!({"s": s, "r": r, "lambda": l}))
                        .collect();
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "s_max": s_max, "r_max": r_max, "cells": cells
                        }))
                        .unwrap()
                    );
                }
                Format::Text | Format::Tsv => {
                    let header: Vec<String> =
                        (0..=r_max).map(|r| format!("R={r}")).collect();
                    println!("S\\R\t{}", header.join("\t"));
                    for s in 2..=s_max {
                        let row: Vec<String> = (0..=r_max)
                            .map(|r| lookup[&(s, r)].to_string())
                            .collect();
                        println!("{s}\t{}", row.join("\t"));
                    }
                }
            }
            Ok(true)
        }
        Command::ZetaQ { s, precision } => {
            let idx = MZIndex::new(parse_u32_list(&s)?)?;
            print_series(&zeta_q(&idx, precision)?, cli.format);
            Ok(true)
        }
        Command::Dual { s } => {
            let idx = MZIndex::new(parse_u32_list(&s)?)?;
            let d = dual(&idx)?;
            match cli.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string(&json!({"dual": d.parts()})).unwrap()
                ),
                Format::Text | Format::Tsv => println!("{d}"),
            }
            Ok(true)
        }
        Command::SpanFit {
            s,
            r,
            basis,
            mono_weight,
            precision,
        } => {
            let target_idx = parse_index(&s, r.as_deref())?;
            let basis_indices: Vec<BiIndex> = match (basis, mono_weight) {
                (Some(words), None) => words
                    .iter()
                    .map(|w| parse_word(w))
                    .collect::<Result<_, _>>()?,
                (None, Some(w)) => mono_basis_up_to(w),
                _ => {
                    return Err(QbracketError::Parse(
                        "span-fit needs exactly one of --basis / --mono-weight".into(),
                    ))
                }
            };
            let target = bi_bracket(&target_idx, precision);
            let fit = md_span_fit(&target, &basis_indices, precision)?;
            if fit.precision_warning {
                eprintln!(
                    "warning: N = {precision} leaves the fit underdetermined for {} basis elements",
                    basis_indices.len()
                );
            }
            match &fit.combination {
                None => {
                    match cli.format {
                        Format::Json => println!("{}", json!({"in_span": false})),
                        _ => println!("no exact combination at N = {precision}"),
                    }
                    Ok(false)
                }
                Some(combo) => {
                    match cli.format {
                        Format::Json => {
                            let terms: Vec<serde_json::Value> = combo
                                .iter()
                                .map(|(idx, c)| {
                                    json!({
                                        "coeff": c.to_string(),
                                        "word": {"s": idx.upper(), "r": idx.lower()},
                                    })
                                })
                                .collect();
                            println!(
                                "{}",
                                serde_json::to_string_pretty(
                                    &json!({"in_span": true, "combination": terms})
                                )
                                .unwrap()
                            );
                        }
                        _ => {
                            let parts: Vec<String> = combo
                                .iter()
                                .map(|(idx, c)| format!("{c}*{idx}"))
                                .collect();
                            println!("{target_idx} = {}", parts.join(" + "));
                        }
                    }
                    Ok(true)
                }
            }
        }
        Command::Verify { suite } => {
            let reports: Vec<SuiteReport> = if suite == "all" {
                SUITE_NAMES
                    .iter()
                    .map(|name| run_suite(name).expect("known suite"))
                    .collect()
            } else {
                match run_suite(&suite) {
                    Some(r) => vec![r],
                    None => {
                        return Err(QbracketError::Parse(format!(
                            "unknown suite {suite:?}; available: {} or \"all\"",
                            SUITE_NAMES.join(", ")
                        )))
                    }
                }
            };
            let all_passed = reports.iter().all(SuiteReport::passed);
            match cli.format {
                Format::Json => {
                    let items: Vec<serde_json::Value> = reports
                        .iter()
                        .map(|r| {
                            json!({
                                "suite": r.suite,
                                "checks": r.checks,
                                "failures": r.failures,
                                "passed": r.passed(),
                            })
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&items).unwrap());
                }
                Format::Text | Format::Tsv => {
                    for r in &reports {
                        println!("{r}");
                    }
                }
            }
            Ok(all_passed)
        }
    }
}

fn mono_basis_up_to(max_weight: u32) -> Vec<BiIndex> {
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

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
