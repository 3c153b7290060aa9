// negated comparisons like `!(x > 0.0)` are guards that must also
// reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use polarlab_cli::{run, run_suite, RunError};

const USAGE: &str = "\
polarlab — residual checks for the polar split of quantum wave equations

USAGE:
    polarlab run <config.conf> [--out <dir>] [--tol-scale <factor>]
    polarlab suite <dir>       [--out <dir>] [--tol-scale <factor>]

Exit status: 0 all checks pass, 1 at least one check failed,
2 configuration or execution error.
";

struct Args {
    command: String,
    target: PathBuf,
    out: PathBuf,
    tol_scale: f64,
}

fn parse_args() -> Result<Args, String> {
    let mut argv = std::env::args().skip(1);
    let command = argv.next().ok_or("missing command")?;
    if command == "--help" || command == "-h" || command == "help" {
        return Err(String::new());
    }
    let target = PathBuf::from(argv.next().ok_or("missing path argument")?);
    let mut out = PathBuf::from("out");
    let mut tol_scale = 1.0_f64;
    while let Some(flag) = argv.next() {
        match flag.as_str() {
            "--out" => {
                out = PathBuf::from(argv.next().ok_or("--out needs a directory")?);
            }
            "--tol-scale" => {
                let raw = argv.next().ok_or("--tol-scale needs a factor")?;
                tol_scale = raw
                    .parse()
                    .map_err(|_| format!("--tol-scale is not a number: '{raw}'"))?;
                if !(tol_scale > 0.0) {
                    return Err(format!("--tol-scale must be positive, got {tol_scale}"));
                }
            }
            other => return Err(format!("unknown flag '{other}'")),
        }
    }
    Ok(Args { command, target, out, tol_scale })
}

fn main() -> ExitCode {
    let args = match parse_args() {
        Ok(args) => args,
        Err(msg) => {
            if msg.is_empty() {
                print!("{USAGE}");
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {msg}\n\n{USAGE}");
            return ExitCode::from(2);
        }
    };

    match args.command.as_str() {
        "run" => match run(&args.target, &args.out, args.tol_scale) {
            Ok(summary) => {
                for check in &summary.checks {
                    println!(
                        "{} {}: {} = {:.3e} (tolerance {:.3e})",
                        if check.pass { "pass" } else { "FAIL" },
                        summary.scenario,
                        check.name,
                        check.value,
                        check.tolerance
                    );
                }
                if summary.pass {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(err) => report_error(err),
        },
        "suite" => match run_suite(&args.target, &args.out, args.tol_scale) {
            Ok(suite) => {
                for scenario in &suite.scenarios {
                    println!(
                        "{} {} ({} checks)",
                        if scenario.pass { "pass" } else { "FAIL" },
                        scenario.scenario,
                        scenario.checks.len()
                    );
                    for check in scenario.failed_checks() {
                        println!(
                            "     failed: {} = {:.3e} (tolerance {:.3e})",
                            check.name, check.value, check.tolerance
                        );
                    }
                }
                println!(
                    "suite: {}/{} scenarios passed in {:.2} s",
                    suite.total - suite.failed,
                    suite.total,
                    suite.wall_time_s
                );
                if suite.pass {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(err) => report_error(err),
        },
        other => {
            eprintln!("error: unknown command '{other}'\n\n{USAGE}");
            ExitCode::from(2)
        }
    }
}

fn report_error(err: RunError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(2)
}
