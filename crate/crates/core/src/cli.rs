//! Command-line front end. Exit codes: 0 success, 2 when a report is only
//! conditional, 1 on error, 64 on usage errors.

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use crate::baker::{reduce_bound_lattice, three_term_height_bound, three_term_setup, UnitLogData};
use crate::census::run_census;
use crate::context::precision_from_env;
use crate::error::{Error, Result};
use crate::io::{parse_alphas, parse_and_validate_bundle, solve_spec, LoadedField, ProblemSpec, SolverChoice};
use crate::oracle::{oracle_coefficient_box, oracle_exponent_box, BoxSpec};
use crate::solver::pipelines::{family_samples, solutions_in_box};
use crate::solver::threeterm::DEFAULT_BUDGET;
use crate::solver::{Completeness, SolveOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CONDITIONAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "normform", version, about = "Norm-form equations over totally complex Galois fields")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Working precision in bits (overrides NORMFORM_PRECISION_BITS).
    #[arg(long, global = true)]
    precision: Option<u32>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug)]
struct ProblemArgs {
    /// Field bundle (JSON).
    #[arg(long)]
    bundle: PathBuf,
    /// Coefficients: shorthand such as "1,z,z2" or a JSON list of coordinate lists.
    #[arg(long, allow_hyphen_values = true)]
    alphas: String,
    #[arg(long, allow_hyphen_values = true)]
    m: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve N(x1 a1 + ... + xk ak) = m and write a report.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        /// auto, threevar, sextic or power_basis.
        #[arg(long, default_value = "auto")]
        solver: String,
        /// Cap on enumerated candidates per three-term equation.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        /// Exponent box for brute-force branches.
        #[arg(long, default_value_t = 12)]
        fallback_bound: i64,
        /// Report JSON path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include stage timings in the JSON (not canonical).
        #[arg(long)]
        timings: bool,
        /// Also list every solution with max|x_i| <= this bound.
        #[arg(long)]
        list_box: Option<i64>,
    },
    /// Brute-force searches: a coefficient box for the norm form, or an
    /// exponent box for the unit equation c0 u0 + ... + c_{t-1} = 0.
    Oracle {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alphas: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        m: Option<String>,
        /// Unit-equation coefficients (shorthand), instead of alphas/m.
        #[arg(long, allow_hyphen_values = true)]
        unit_eq: Option<String>,
        #[arg(long = "box")]
        bound: i64,
        #[arg(long)]
        cap: Option<u128>,
    },
    /// Parse and validate a field bundle.
    VerifyBundle {
        #[arg(long)]
        bundle: PathBuf,
        /// Print the canonical form.
        #[arg(long)]
        canonical: bool,
    },
    /// Solution families only, with sampled members checked exactly.
    Families {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Bound certificate chain for alpha x + beta y + gamma = 0.
    Bound {
        #[arg(long)]
        bundle: PathBuf,
        /// Three coefficients alpha,beta,gamma in shorthand.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
    /// Rank-condition census over a directory of bundles.
    Census {
        #[arg(long)]
        dir: PathBuf,
    },
}

fn load(path: &PathBuf, precision: u32) -> Result<LoadedField> {
    let doc = std::fs::read_to_string(path)?;
    parse_and_validate_bundle(&doc, precision).map_err(|errs| {
        for e in &errs {
            eprintln!("error: {}", e);
        }
        errs.into_iter().next().unwrap_or(Error::InvalidInput("invalid bundle".into()))
    })
}

fn parse_m(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|_| Error::InvalidInput(format!("m must be an integer, got {:?}", s)))
}

fn spec_for(field: &LoadedField, args: &ProblemArgs, solver: SolverChoice, options: SolveOptions) -> Result<ProblemSpec> {
    ProblemSpec::new(field, &args.alphas, parse_m(&args.m)?, solver, options)
}

fn run(cli: Cli) -> Result<i32> {
    let precision = cli.precision.unwrap_or_else(precision_from_env);
    match cli.cmd {
        Command::Solve { problem, solver, budget, fallback_bound, out, timings, list_box } => {
            let field = load(&problem.bundle, precision)?;
            let spec = spec_for(&field, &problem, SolverChoice::from_str(&solver)?, SolveOptions { budget, fallback_bound })?;
            let report = solve_spec(&field, &spec)?;
            let json = if timings { report.json_with_timings() } else { report.canonical_json() };
            match out {
                Some(p) => {
                    std::fs::write(&p, json + "\n")?;
                    print!("{}", report.summary());
                }
                None => println!("{}", json),
            }
            if let Some(b) = list_box {
                let p = spec.problem(&field)?;
                let mut xs = solutions_in_box(&report, &p, field.solver_units()?, b)?;
                if !field.is_galois() {
                    xs.retain(|x| spec.holds_over_k(&x.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>()));
                }
                println!("solutions with max|x_i| <= {}: {}", b, xs.len());
                for x in xs {
                    println!("  {:?}", x);
                }
            }
            Ok(if report.completeness == Completeness::Proven { EXIT_OK } else { EXIT_CONDITIONAL })
        }
        Command::Oracle { bundle, alphas, m, unit_eq, bound, cap } => {
            let field = load(&bundle, precision)?;
            let mut spec = BoxSpec::new(bound);
            if let Some(c) = cap {
                spec.cap = c;
            }
            match (alphas, m, unit_eq) {
                (Some(a), Some(m), None) => {
                    let ps = ProblemSpec::new(&field, &a, parse_m(&m)?, SolverChoice::Auto, SolveOptions::default())?;
                    let p = ps.problem(&field)?;
                    let mut xs = oracle_coefficient_box(&p, &spec)?;
                    if !field.is_galois() {
                        xs.retain(|x| ps.holds_over_k(&x.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>()));
                    }
                    for x in &xs {
                        println!("{:?}", x);
                    }
                    eprintln!("{} solutions with max|x_i| <= {}", xs.len(), bound);
                }
                (None, None, Some(eq)) => {
                    let units = field.solver_units()?;
                    let coeffs = parse_alphas(&eq, &field.field)?
                        .iter()
                        .map(|c| field.to_solver_field(c))
                        .collect::<Result<Vec<_>>>()?;
                    let sols = oracle_exponent_box(&coeffs, units, &spec)?;
                    for s in &sols {
                        println!("{}", s.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("  "));
                    }
                    eprintln!("{} solutions with |a_i| <= {}", sols.len(), bound);
                }
                _ => return Err(Error::InvalidInput("oracle needs either --alphas and --m, or --unit-eq".into())),
            }
            Ok(EXIT_OK)
        }
        Command::VerifyBundle { bundle, canonical } => {
            let field = load(&bundle, precision)?;
            if canonical {
                println!("{}", field.bundle.emit());
            }
            let units = field.solver_units();
            println!("{}: valid", field.bundle.label);
            println!("  degree {}", field.bundle.degree());
            match units {
                Ok(u) => {
                    println!("  Galois group order {}", u.ctx.gal.order());
                    println!("  places {}, CM {}", u.ctx.s(), u.ctx.is_cm());
                    println!("  torsion order {}, unit rank {}", u.w(), u.rank());
                }
                Err(_) => println!("  not Galois; no normal closure supplied"),
            }
            println!("  regulator {}", if field.regulator_verified { "matches" } else { "does not match the computed value" });
            Ok(EXIT_OK)
        }
        Command::Families { problem, samples } => {
            let field = load(&problem.bundle, precision)?;
            let spec = spec_for(&field, &problem, SolverChoice::Auto, SolveOptions::default())?;
            let report = solve_spec(&field, &spec)?;
            let p = spec.problem(&field)?;
            let units = field.solver_units()?;
            println!("{}", serde_json::to_string_pretty(&report.families).expect("families serialize"));
            let mut failures = 0;
            for (i, f) in report.families.iter().enumerate() {
                let xs = family_samples(&p, units, f, samples, 8);
                failures += xs.iter().filter(|x| !p.is_solution(x)).count();
                eprintln!("family {}: {} sampled integral members checked", i, xs.len());
            }
            if failures > 0 {
                return Err(Error::Validation { check: "family_members".into(), witness: format!("{} sampled members fail", failures) });
            }
            Ok(if report.completeness == Completeness::Proven { EXIT_OK } else { EXIT_CONDITIONAL })
        }
        Command::Bound { bundle, coeffs } => {
            let field = load(&bundle, precision)?;
            let units = field.solver_units()?;
            let cs = parse_alphas(&coeffs, &field.field)?.iter().map(|c| field.to_solver_field(c)).collect::<Result<Vec<_>>>()?;
            if cs.len() != 3 {
                return Err(Error::InvalidInput(format!("bound needs three coefficients, got {}", cs.len())));
            }
            let data = UnitLogData::new(units)?;
            let setup = three_term_setup(&cs[0], &cs[1], &cs[2], units, &data)?;
            let h = setup.forms.iter().map(|f| f.h0).fold(0.0, f64::max);
            let cert0 = three_term_height_bound(&setup, (h, 0.0))?;
            let cert = reduce_bound_lattice(&cert0, &setup)?;
            println!("{}", serde_json::to_string_pretty(&cert).expect("certificate serializes"));
            Ok(EXIT_OK)
        }
        Command::Census { dir } => {
            let c = run_census(&dir, precision)?;
            for r in &c.rows {
                let status = match (&r.error, r.applicable) {
                    (Some(e), _) => format!("error: {}", e),
                    (None, true) => "rank condition holds".to_string(),
                    (None, false) => match &r.witness {
                        Some(w) => format!("rank condition fails on columns {:?}", w),
                        None => "not applicable".to_string(),
                    },
                };
                println!("{:<24} {:<28} {}", r.file, r.label, status);
            }
            println!("{} of {} fields satisfy the rank condition", c.applicable, c.total);
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            EXIT_ERROR
        }
    }
}
