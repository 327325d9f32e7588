//! Command-line front end: evaluate density grids, draw samples, compute
//! moment reports, and run the verification battery.
//!
//! Exit codes are a stable contract:
//!   0  success
//!   1  at least one verification check failed
//!   2  invalid parameters (file, coefficients, grid)
//!   3  unsupported case (e.g. closed-form moments outside the tractable
//!      configuration)

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use secdist::moments::{expect_y_monte_carlo, moment_report};
use secdist::verify::{battery_csv, run_battery, BatteryOptions};
use secdist::{
    density_grid, density_grid_csv, fuzz_param_sets, read_file, sec_sample, Error, GridSpec,
    ParamSet, QuadratureSpec, SecDensity,
};

#[derive(Parser)]
#[command(
    name = "secdist",
    version,
    about = "Skew-elliptically-contoured distributions: density grids, exact sampling, moments, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the density on a rectangular grid and write x,y,density CSV
    DensityGrid {
        /// Parameter file (flat key = value format)
        #[arg(long)]
        params: PathBuf,
        /// Grid as xmin,xmax,ymin,ymax,nx,ny
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw exact seeded samples via the conditional-reflection
    /// representation and write CSV
    Sample {
        #[arg(long)]
        params: PathBuf,
        /// Number of draws
        #[arg(long)]
        n: usize,
        /// RNG seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute an E\[Y\] report by quadrature, closed form, or Monte Carlo
    Moments {
        #[arg(long)]
        params: PathBuf,
        /// One of: quad, closed, mc
        #[arg(long, default_value = "quad")]
        method: String,
        /// Monte Carlo sample size (mc method)
        #[arg(long, default_value_t = 500_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the verification battery and write a CSV of check reports
    Verify {
        /// Parameter file; every set in it is checked
        #[arg(long, conflicts_with = "fuzz")]
        params: Option<PathBuf>,
        /// Generate this many random valid parameter sets instead
        #[arg(long)]
        fuzz: Option<usize>,
        #[arg(long, default_value_t = 7_654_321)]
        seed: u64,
        /// Include the chi-square sampler/density agreement per set
        #[arg(long, default_value_t = false)]
        sampler_check: bool,
        /// Plant the broken-w and asymmetric-G0 controls (they must fail,
        /// so the process exits 1)
        #[arg(long, default_value_t = false)]
        negative_controls: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::UnsupportedCase(_) => 3,
        _ => 2,
    }
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code_for(&err))
}

fn load_first_set(path: &PathBuf) -> Result<SecDensity, Error> {
    let sets = read_file(path)?;
    sets[0].build()
}

fn write_out(path: &PathBuf, payload: &str) -> Result<(), Error> {
    std::fs::write(path, payload).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::DensityGrid { params, grid, out } => {
            let spec = match GridSpec::parse(&grid) {
                Ok(g) => g,
                Err(e) => return fail(e),
            };
            let s = match load_first_set(&params) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            let values = match density_grid(&s, &spec) {
                Ok(v) => v,
                Err(e) => return fail(e),
            };
            if let Err(e) = write_out(&out, &density_grid_csv(&s, &spec, &values)) {
                return fail(e);
            }
            eprintln!("wrote {} ({} nodes)", out.display(), values.len());
            ExitCode::SUCCESS
        }

        Command::Sample {
            params,
            n,
            seed,
            out,
        } => {
            let s = match load_first_set(&params) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            let batch = match sec_sample(&s, n, seed) {
                Ok(b) => b,
                Err(e) => return fail(e),
            };
            if let Err(e) = write_out(&out, &batch.to_csv()) {
                return fail(e);
            }
            eprintln!(
                "wrote {} ({} draws, {} sign flips)",
                out.display(),
                batch.n(),
                batch.flip_count
            );
            ExitCode::SUCCESS
        }

        Command::Moments {
            params,
            method,
            n,
            seed,
            out,
        } => {
            let sets = match read_file(&params) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            let set = &sets[0];
            let s = match set.build() {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            let seed_note = if method == "mc" {
                format!(" n={n} seed={seed}")
            } else {
                String::new()
            };
            let header = format!(
                "# secdist v{} moments params={} method={method}{seed_note}\nparams_id,method,e_y,closed_form,discrepancy\n",
                env!("CARGO_PKG_VERSION"),
                set.id
            );
            let q = QuadratureSpec::default();
            let row = match method.as_str() {
                "quad" => match moment_report(&s, q) {
                    Ok(r) => r.csv_row(&set.id, "quad", r.e_y_quadrature),
                    Err(e) => return fail(e),
                },
                "closed" => match moment_report(&s, q) {
                    Ok(r) => match r.e_y_closed_form {
                        Some(c) => r.csv_row(&set.id, "closed", c),
                        None => {
                            return fail(Error::UnsupportedCase(format!(
                                "h_kind `{}` has no closed-form E[Y]",
                                s.h().name()
                            )))
                        }
                    },
                    Err(e) => return fail(e),
                },
                "mc" => match expect_y_monte_carlo(&s, n, seed) {
                    Ok((est, se)) => {
                        eprintln!("mc standard error: {se}");
                        format!("{},mc,{est},,", set.id)
                    }
                    Err(e) => return fail(e),
                },
                other => {
                    return fail(Error::InvalidParameter(format!(
                        "unknown method `{other}` (expected quad, closed, or mc)"
                    )))
                }
            };
            if let Err(e) = write_out(&out, &format!("{header}{row}\n")) {
                return fail(e);
            }
            eprintln!("wrote {}", out.display());
            ExitCode::SUCCESS
        }

        Command::Verify {
            params,
            fuzz,
            seed,
            sampler_check,
            negative_controls,
            out,
        } => {
            let param_sets: Vec<ParamSet> = match (&params, fuzz) {
                (Some(path), None) => match read_file(path) {
                    Ok(s) => s,
                    Err(e) => return fail(e),
                },
                (None, Some(count)) => fuzz_param_sets(count, seed),
                (None, None) => {
                    return fail(Error::InvalidParameter(
                        "verify needs either --params or --fuzz".into(),
                    ))
                }
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            let mut sets = Vec::with_capacity(param_sets.len());
            for p in &param_sets {
                match p.build() {
                    Ok(s) => sets.push(s),
                    Err(e) => return fail(e),
                }
            }
            let opts = BatteryOptions {
                seed,
                sampler_check,
                negative_controls,
                ..Default::default()
            };
            let reports = match run_battery(&sets, &opts) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let header = format!(
                "# secdist v{} verify seed={seed}\n",
                env!("CARGO_PKG_VERSION")
            );
            if let Err(e) = write_out(&out, &format!("{header}{}", battery_csv(&reports))) {
                return fail(e);
            }
            let failures: Vec<&secdist::CheckReport> =
                reports.iter().filter(|r| !r.passed).collect();
            for r in &reports {
                eprintln!(
                    "{}: {} (statistic {:.3e}, threshold {:.3e}, {} ms)",
                    r.check_name,
                    if r.passed { "pass" } else { "FAIL" },
                    r.statistic,
                    r.threshold,
                    r.runtime_ms
                );
            }
            eprintln!(
                "wrote {} ({} checks, {} failed)",
                out.display(),
                reports.len(),
                failures.len()
            );
            if failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
