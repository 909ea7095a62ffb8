//! Minimal external classifier speaking the line-delimited JSON protocol.
//!
//! Modes:
//!   uniform <k>          every series gets 1/k per class
//!   fixed <p1,p2,...>    every series gets the given row verbatim
//!   sign                 [1,0] when the first value is >= 0, else [0,1]
//!   exit-after <n> <k>   answers n requests uniformly, then exits
//!   bad-id <k>           answers with a mismatched id

use std::io::{self, BufRead, Write};
use std::process::ExitCode;

use tscf_core::wire::{Request, Response};

type RowFn = Box<dyn Fn(&[f64]) -> Vec<f64>>;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let usage = || {
        eprintln!(
            "usage: wire-stub uniform <k> | fixed <p,..> | sign | exit-after <n> <k> | bad-id <k>"
        );
        ExitCode::from(1)
    };
    let parse_k = |s: Option<&String>| s.and_then(|s| s.parse::<usize>().ok()).filter(|&k| k > 0);

    let (row_for, limit, id_shift): (RowFn, Option<usize>, u64) =
        match args.first().map(String::as_str) {
            Some("uniform") => match parse_k(args.get(1)) {
                Some(k) => (Box::new(move |_| vec![1.0 / k as f64; k]), None, 0),
                None => return usage(),
            },
            Some("fixed") => {
                let row: Option<Vec<f64>> = args
                    .get(1)
                    .and_then(|s| s.split(',').map(|t| t.trim().parse().ok()).collect());
                match row {
                    Some(row) => (Box::new(move |_| row.clone()), None, 0),
                    None => return usage(),
                }
            }
            Some("sign") => (
                Box::new(|s: &[f64]| {
                    if s[0] >= 0.0 {
                        vec![1.0, 0.0]
                    } else {
                        vec![0.0, 1.0]
                    }
                }),
                None,
                0,
            ),
            Some("exit-after") => {
                let n = args.get(1).and_then(|s| s.parse().ok());
                match (n, parse_k(args.get(2))) {
                    (Some(n), Some(k)) => (Box::new(move |_| vec![1.0 / k as f64; k]), Some(n), 0),
                    _ => return usage(),
                }
            }
            Some("bad-id") => match parse_k(args.get(1)) {
                Some(k) => (Box::new(move |_| vec![1.0 / k as f64; k]), None, 1),
                None => return usage(),
            },
            _ => return usage(),
        };

    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    for (answered, line) in stdin.lock().lines().enumerate() {
        if limit.is_some_and(|n| answered >= n) {
            break;
        }
        let Ok(line) = line else { break };
        let req: Request = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("wire-stub: bad request: {e}");
                return ExitCode::from(2);
            }
        };
        let resp = Response {
            id: req.id + id_shift,
            probs: req.series.iter().map(|s| row_for(s)).collect(),
        };
        let json = serde_json::to_string(&resp).expect("serializable response");
        if writeln!(out, "{json}").and_then(|_| out.flush()).is_err() {
            break;
        }
    }
    ExitCode::SUCCESS
}
