//! `qform`: exact arithmetic of integral quadratic forms from the command line.
//!
//! Every report is a JSON document on standard output. Exit status is 0 on
//! success, 1 when `selftest` finds a mismatch, 2 on invalid input or a failed
//! precondition, and 3 when a computation exceeds its budget.

mod input;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use qform::clifford::{spinor_norm, OrthogonalMap};
use qform::densities::{eisenstein_coefficient_genus_avg, eisenstein_coefficient_product, jacobi_r4, local_density_infty, local_density_p, EisensteinCoefficient};
use qform::genus::{all_p_neighbors, genus_enumerate_with, lll, neighbor_graph, GenusCatalog, GenusOptions};
use qform::linalg::RatMatrix;
use qform::local::{qp_invariants, Place};
use qform::theta::{cusp_coefficients, eisenstein_prefix, enumerate_representations_with_budget, theta_coefficients_with_budget, DEFAULT_ENUMERATION_BUDGET};
use qform::{Error, QuadraticForm, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::input::{load_form, load_json, parse_matrix, parse_primes};
use crate::report::{form, int, rational, real};

#[derive(Parser)]
#[command(name = "qform", version, about = "Exact arithmetic of integral quadratic forms")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunConfig {
    /// Worker threads for enumeration; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed for the sampled checks of `selftest`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Maximum number of lattice points visited by one enumeration.
    #[arg(long, global = true, env = "QFORM_BUDGET", default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u128,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Product,
    Genus,
}

#[derive(Args)]
struct FormArg {
    /// Form as inline JSON (`{"n":..,"hessian":[[..]]}` or a list of Hessian rows) or a path to a JSON file.
    #[arg(long)]
    form: String,
}

#[derive(Args)]
struct GenusArgs {
    /// Comma-separated neighbor primes; two small good primes by default.
    #[arg(long)]
    primes: Option<String>,
    /// Known mass `a/b` that certifies the catalog once reached.
    #[arg(long)]
    target_mass: Option<String>,
    #[arg(long)]
    max_classes: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension, determinant square class and Hasse invariant at one place.
    Invariants {
        #[command(flatten)]
        form: FormArg,
        /// A prime or `inf`.
        #[arg(long, visible_alias = "p")]
        place: Place,
    },
    /// Local representation density of `m` at a prime or at `inf`.
    Density {
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        p: Place,
        #[arg(long, allow_negative_numbers = true)]
        m: i64,
    },
    /// Eisenstein coefficient `a_E(m)`.
    Eisenstein {
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        m: u64,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[command(flatten)]
        genus: GenusArgs,
    },
    /// Theta coefficients `r_Q(0..=max)`; CSV adds the Eisenstein and cusp parts.
    Theta {
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        max: u64,
        #[command(flatten)]
        genus: GenusArgs,
    },
    /// All p-neighbors of a positive definite form, LLL-reduced.
    Neighbors {
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        p: u64,
    },
    /// Class representatives of the genus with automorphism counts and neighbor graphs.
    Genus {
        #[command(flatten)]
        form: FormArg,
        #[command(flatten)]
        genus: GenusArgs,
    },
    /// Mass `Σ 1/|Aut|` of the genus.
    Mass {
        #[command(flatten)]
        form: FormArg,
        #[command(flatten)]
        genus: GenusArgs,
    },
    /// Spinor norm of a rational isometry given by its matrix.
    SpinorNorm {
        #[command(flatten)]
        form: FormArg,
        /// Matrix rows as inline JSON or a file path; entries are integers, "a/b" strings or {"num","den"}.
        #[arg(long)]
        matrix: String,
    },
    /// Four-squares worked example checked against Jacobi's formula.
    Selftest {
        #[arg(long, default_value_t = 100)]
        max: u64,
        /// Extra seeded values of `m` drawn from `max+1..=10·max`.
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
}

enum Output {
    Json(Value),
    Csv(Vec<Vec<String>>),
    Failed(Value),
}

fn genus_options(args: &GenusArgs) -> Result<GenusOptions> {
    let target_mass = match &args.target_mass {
        Some(s) => Some(s.parse::<BigRational>().map_err(|_| Error::Precondition(format!("bad mass `{s}`")))?),
        None => None,
    };
    let primes = args.primes.as_deref().map(parse_primes).transpose()?.unwrap_or_default();
    Ok(GenusOptions { primes, target_mass, max_classes: args.max_classes })
}

fn catalog_json(c: &GenusCatalog) -> Result<Value> {
    let reps: Vec<Value> = c
        .representatives
        .iter()
        .zip(c.aut_counts.iter().zip(&c.proper_aut_counts))
        .map(|(q, (a, pa))| json!({"form": form(q), "aut": a, "proper_aut": pa}))
        .collect();
    let graphs = c
        .primes_used
        .iter()
        .map(|&p| {
            let g = neighbor_graph(c, p)?;
            Ok(json!({"p": p, "edges": g.edges, "regular": g.is_regular()}))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "class_number": c.class_number(),
        "completeness": c.completeness,
        "primes": c.primes_used,
        "mass": rational(&c.mass),
        "start_index": c.start_index,
        "representatives": reps,
        "graphs": graphs,
    }))
}

fn eisenstein(q: &QuadraticForm, m: u64, method: Method, genus: &GenusArgs) -> Result<EisensteinCoefficient> {
    let by_genus = || eisenstein_coefficient_genus_avg(q, m, &genus_enumerate_with(q, &genus_options(genus)?)?);
    match method {
        Method::Product => eisenstein_coefficient_product(q, m),
        Method::Genus => by_genus(),
        Method::Auto => match eisenstein_coefficient_product(q, m) {
            Err(Error::Unsupported(_)) => by_genus(),
            other => other,
        },
    }
}

fn selftest(max: u64, samples: usize, seed: u64, budget: u128) -> Result<Output> {
    let q = QuadraticForm::sum_of_squares(4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ms: Vec<u64> = (1..=max).collect();
    ms.extend((0..samples).map(|_| rng.gen_range(max + 1..=10 * max.max(1))));
    let mut rows = Vec::new();
    let mut worst = BigRational::zero();
    for &m in &ms {
        let enumerated = enumerate_representations_with_budget(&q, m, budget)?;
        let jacobi = jacobi_r4(m);
        let eis = eisenstein_coefficient_product(&q, m)?.value.as_rational().ok_or(Error::Unsupported("irrational a_E".into()))?;
        let exact = BigRational::from_integer(BigInt::from(jacobi));
        let residual = (BigRational::from_integer(BigInt::from(enumerated)) - &exact).abs().max((eis - &exact).abs());
        if residual > worst {
            worst = residual.clone();
        }
        rows.push(json!({"m": m, "enumerated": enumerated, "jacobi": jacobi, "residual": rational(&residual)}));
    }
    let pass = worst.is_zero();
    let report = json!({"status": if pass { "PASS" } else { "FAIL" }, "seed": seed, "max_residual": rational(&worst), "results": rows});
    Ok(if pass { Output::Json(report) } else { Output::Failed(report) })
}

fn run(cli: &Cli) -> Result<Output> {
    let cfg = &cli.config;
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global().map_err(|e| Error::Precondition(e.to_string()))?;
    }
    let csv_only_for = |name: &str| {
        if cfg.format == Format::Csv {
            Err(Error::Unsupported(format!("`{name}` has no CSV output")))
        } else {
            Ok(())
        }
    };
    let out = match &cli.command {
        Command::Invariants { form: f, place } => {
            csv_only_for("invariants")?;
            let inv = qp_invariants(&load_form(&f.form)?, *place)?;
            json!({
                "place": place.to_string(),
                "n": inv.n,
                "det_class": {"unit": inv.det_class.unit, "odd_valuation": inv.det_class.odd_valuation, "representative": rational(&inv.det_class.representative())},
                "hasse": inv.hasse,
            })
        }
        Command::Density { form: f, p, m } => {
            csv_only_for("density")?;
            let q = load_form(&f.form)?;
            let d = match p {
                Place::Infinity => local_density_infty(&q, *m)?,
                Place::Prime(p) => local_density_p(&q, *m, *p)?,
            };
            json!({"place": p.to_string(), "m": m, "value": real(&d.value), "exponent": d.exponent})
        }
        Command::Eisenstein { form: f, m, method, genus } => {
            csv_only_for("eisenstein")?;
            let e = eisenstein(&load_form(&f.form)?, *m, *method, genus)?;
            json!({"m": e.m, "value": real(&e.value), "provenance": e.provenance})
        }
        Command::Theta { form: f, max, genus } => {
            let q = load_form(&f.form)?;
            let t = theta_coefficients_with_budget(&q, *max, cfg.budget)?;
            if cfg.format == Format::Csv {
                let catalog = genus_enumerate_with(&q, &genus_options(genus)?)?;
                let eis = eisenstein_prefix(&catalog, *max)?;
                let cusp = cusp_coefficients(&q, *max, &catalog)?;
                let mut rows = vec![["m", "r_Q(m)", "a_E(m)", "a_C(m)"].map(String::from).to_vec()];
                for (m, r) in t.coefficients.iter().enumerate() {
                    rows.push(vec![m.to_string(), r.to_string(), eis[m].to_string(), cusp[m].to_string()]);
                }
                return Ok(Output::Csv(rows));
            }
            json!({"form": form(&q), "bound": max, "coefficients": t.coefficients})
        }
        Command::Neighbors { form: f, p } => {
            csv_only_for("neighbors")?;
            let q = load_form(&f.form)?;
            let nbs = all_p_neighbors(&q, *p)?.iter().map(|nb| Ok(form(&lll(nb)?.form))).collect::<Result<Vec<_>>>()?;
            json!({"p": p, "count": nbs.len(), "neighbors": nbs})
        }
        Command::Genus { form: f, genus } => {
            let catalog = genus_enumerate_with(&load_form(&f.form)?, &genus_options(genus)?)?;
            if cfg.format == Format::Csv {
                let mut rows = vec![["index", "aut", "proper_aut", "hessian"].map(String::from).to_vec()];
                for (i, q) in catalog.representatives.iter().enumerate() {
                    let h = serde_json::to_string(&q.rows()).expect("rows serialize");
                    rows.push(vec![i.to_string(), catalog.aut_counts[i].to_string(), catalog.proper_aut_counts[i].to_string(), h]);
                }
                return Ok(Output::Csv(rows));
            }
            catalog_json(&catalog)?
        }
        Command::Mass { form: f, genus } => {
            csv_only_for("mass")?;
            let c = genus_enumerate_with(&load_form(&f.form)?, &genus_options(genus)?)?;
            json!({"mass": rational(&c.mass), "completeness": c.completeness, "class_number": c.class_number(), "aut_counts": c.aut_counts})
        }
        Command::SpinorNorm { form: f, matrix } => {
            csv_only_for("spinor-norm")?;
            let q = load_form(&f.form)?;
            let sigma = OrthogonalMap::new(&q, RatMatrix::from_rows(parse_matrix(&load_json(matrix)?)?))?;
            let sn = spinor_norm(&sigma)?;
            let refl: Vec<Vec<Value>> = sn.reflections.iter().map(|v| v.iter().map(rational).collect()).collect();
            json!({"spinor_norm": int(&sn.value), "det": sn.det, "reflections": refl})
        }
        Command::Selftest { max, samples } => {
            let out = selftest(*max, *samples, cfg.seed, cfg.budget)?;
            if cfg.format == Format::Csv {
                let (Output::Json(r) | Output::Failed(r)) = &out else { unreachable!() };
                let mut rows = vec![["m", "enumerated", "jacobi"].map(String::from).to_vec()];
                for row in r["results"].as_array().expect("results") {
                    rows.push(["m", "enumerated", "jacobi"].iter().map(|k| row[k].to_string()).collect());
                }
                return Ok(Output::Csv(rows));
            }
            return Ok(out);
        }
    };
    Ok(Output::Json(out))
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::BudgetExceeded { .. } => "budget_exceeded",
        Error::Overflow(_) => "overflow",
        Error::NotStabilized { .. } => "not_stabilized",
        Error::IncompleteCatalog => "incomplete_catalog",
        Error::Unsupported(_) => "unsupported",
        Error::NotPrime(_) => "not_prime",
        Error::NotPositiveDefinite => "not_positive_definite",
        Error::Degenerate => "degenerate",
        Error::NotIsometry => "not_isometry",
        Error::Isotropic => "isotropic",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::InvalidHessian(_) => "invalid_hessian",
        _ => "precondition",
    }
}

fn print_json(v: &Value) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("reports serialize"));
}

fn print_csv(rows: &[Vec<String>]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Output::Json(v)) => {
            print_json(&v);
            ExitCode::SUCCESS
        }
        Ok(Output::Csv(rows)) => {
            let _ = print_csv(&rows);
            ExitCode::SUCCESS
        }
        Ok(Output::Failed(v)) => {
            print_json(&v);
            ExitCode::from(1)
        }
        Err(e) => {
            print_json(&json!({"error": {"kind": error_kind(&e), "message": e.to_string()}}));
            ExitCode::from(if e.is_budget() { 3 } else { 2 })
        }
    }
}
