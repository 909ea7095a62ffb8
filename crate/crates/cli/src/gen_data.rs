use tscf_core::{generate_cbf_total, Dataset64};

use crate::args::{GenDataArgs, Generator};
use crate::error::{data, CliError, Result};
use crate::files::{create_dir, write_atomic};
use crate::GlobalOpts;

pub const TRAIN_FILE: &str = "CBF_TRAIN.tsv";
pub const TEST_FILE: &str = "CBF_TEST.tsv";

/// `--train` and `--test` are total row counts. The test split uses
/// `seed + 1` so it never repeats training series.
pub fn run(global: &GlobalOpts, args: &GenDataArgs) -> Result<()> {
    let out = global
        .output
        .as_ref()
        .ok_or_else(|| CliError::Usage("gen-data requires -o/--output".into()))?;
    let seed = global.seed.unwrap_or(0);
    let Generator::Cbf = args.generator;
    let make = |n: usize, seed: u64| -> Result<Dataset64> {
        generate_cbf_total(n, args.length, seed).map_err(|e| CliError::Usage(e.to_string()))
    };
    let train = make(args.train, seed)?;
    let test = make(args.test, seed.wrapping_add(1))?;

    create_dir(out)?;
    for (name, d) in [(TRAIN_FILE, &train), (TEST_FILE, &test)] {
        write_atomic(&out.join(name), d.to_ucr().as_bytes()).map_err(data(name))?;
    }
    println!(
        "wrote {} train and {} test series of length {} to {}",
        train.len(),
        test.len(),
        args.length,
        out.display()
    );
    Ok(())
}
