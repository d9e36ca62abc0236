//! `workbench`: command-line front end for the reflection-group invariant
//! workbench. Every command prints a JSON report with a stable field order;
//! exit code 0 means no violations, 1 means violations, 2 a usage error.

mod config;
mod report;

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use workbench_core::chevalley::{basic_invariants, ChevalleyMap};
use workbench_core::coxeter::{
    build_group_with_backend, Backend, CoxeterTypeSpec, ReflectionGroup,
};
use workbench_core::polyalg::json::{poly_from_json_str, CoefJson, PointsJson, PolyJson};
use workbench_core::selftest::{run_suite, Suite};
use workbench_core::whitney::{self, JetField, ProbeConfig};
use workbench_core::{FieldElem, SparsePoly};

use config::FileConfig;
use report::{usage_error, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Exact,
    Numeric,
}

#[derive(Parser)]
#[command(
    name = "workbench",
    version,
    about = "invariant-theory workbench for finite reflection groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Field backend; defaults to the exact model when one exists.
    #[arg(long, global = true)]
    backend: Option<BackendArg>,
    /// Seed for randomized suites (flag > config > WORKBENCH_SEED > 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write the JSON report to this path.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Optional key=value config file mirroring the flags; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Tolerance for numeric-backend verification (default 1e-9).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Group summary: order, degrees, reflection arrangement.
    Info { group: String },
    /// Basic invariants with their degree bookkeeping.
    Invariants { group: String },
    /// Jacobian factorization J = c·∏λ (exact) or pointwise check (numeric).
    Jacobian {
        group: String,
        /// Re-multiply the factors and compare against the determinant.
        #[arg(long)]
        verify: bool,
    },
    /// Discriminant Δ with Δ∘P = J².
    Discriminant { group: String },
    /// Rewrite an invariant polynomial as F(p₁,…,pₙ).
    Rewrite {
        group: String,
        #[arg(long)]
        poly: PathBuf,
    },
    /// Solve the gradient system by Cramer's rule and cross-check.
    Gradient {
        group: String,
        #[arg(long)]
        poly: PathBuf,
    },
    /// Intersection lattice with isotropy data and verification passes.
    Strata {
        group: String,
        #[arg(long, default_value = "all")]
        check: StrataCheck,
    },
    /// Differentiability-loss probe along a ray.
    Probe {
        group: String,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long, default_value_t = 0.2)]
        alpha: f64,
        /// Comma-separated ray direction, e.g. "1,1".
        #[arg(long)]
        ray: Option<String>,
        /// Grid bounds and size; default 1e-3 .. 1e-1 with 25 samples.
        #[arg(long)]
        tmin: Option<f64>,
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Write per-order fits as CSV (k,slope,residual,verdict).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Jet operations on JSON-specified polynomials and point sets.
    Jet {
        #[command(subcommand)]
        command: JetCommand,
    },
    /// Run the module property suites.
    Selftest {
        #[arg(default_value = "all")]
        suite: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrataCheck {
    Flatness,
    Monotonicity,
    All,
}

#[derive(Subcommand)]
enum JetCommand {
    /// Taylor field of a polynomial over a point set.
    Taylor {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        order: u32,
    },
    /// Jet seminorm of the Taylor field on the whole point set.
    Seminorm {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        order: u32,
        /// Regularity index r ≤ order.
        #[arg(long)]
        reg: u32,
    },
}

struct Context {
    backend: Option<BackendArg>,
    seed: u64,
    output: Option<PathBuf>,
    tolerance: f64,
}

fn main() {
    let cli = Cli::parse();
    let file_config = match &cli.config {
        Some(path) => match FileConfig::load(path) {
            Ok(c) => c,
            Err(e) => usage_error(e),
        },
        None => FileConfig::default(),
    };
    let backend = cli.backend.or_else(|| {
        file_config.get("backend").map(|v| match v {
            "exact" => BackendArg::Exact,
            "numeric" => BackendArg::Numeric,
            other => usage_error(format!("bad backend in config: {other:?}")),
        })
    });
    let seed = cli
        .seed
        .or_else(|| {
            file_config.get("seed").map(|v| {
                v.parse()
                    .unwrap_or_else(|_| usage_error("bad seed in config"))
            })
        })
        .or_else(|| {
            std::env::var("WORKBENCH_SEED").ok().map(|v| {
                v.parse()
                    .unwrap_or_else(|_| usage_error("bad WORKBENCH_SEED"))
            })
        })
        .unwrap_or(0);
    let output = cli
        .output
        .clone()
        .or_else(|| file_config.get("output").map(PathBuf::from));
    let tolerance = cli
        .tolerance
        .or_else(|| {
            file_config.get("tolerance").map(|v| {
                v.parse()
                    .unwrap_or_else(|_| usage_error("bad tolerance in config"))
            })
        })
        .unwrap_or(1e-9);
    let ctx = Context {
        backend,
        seed,
        output,
        tolerance,
    };
    let started = Instant::now();
    let mut report = dispatch(&cli.command, &ctx, &file_config);
    report.timing_ms = started.elapsed().as_secs_f64() * 1e3;
    if let Err(e) = report.emit(ctx.output.as_deref()) {
        usage_error(format!("cannot write report: {e}"));
    }
    std::process::exit(report.exit_code());
}

fn parse_group(s: &str) -> CoxeterTypeSpec {
    CoxeterTypeSpec::from_str(s).unwrap_or_else(|e| usage_error(e))
}

fn build(spec: CoxeterTypeSpec, ctx: &Context) -> ReflectionGroup {
    let backend = match ctx.backend {
        Some(BackendArg::Exact) => Backend::Exact,
        Some(BackendArg::Numeric) => Backend::Numeric,
        None => match build_group_with_backend(spec, Backend::Exact) {
            Ok(g) => return g,
            Err(_) => Backend::Numeric,
        },
    };
    build_group_with_backend(spec, backend).unwrap_or_else(|e| usage_error(e))
}

fn chevalley_map(group_str: &str, ctx: &Context) -> ChevalleyMap {
    let group = build(parse_group(group_str), ctx);
    basic_invariants(Arc::new(group)).unwrap_or_else(|e| usage_error(e))
}

fn load_poly(path: &Path) -> SparsePoly {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| usage_error(format!("cannot read {}: {e}", path.display())));
    poly_from_json_str(&text).unwrap_or_else(|e| usage_error(e))
}

fn load_points(path: &Path) -> Vec<Vec<FieldElem>> {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| usage_error(format!("cannot read {}: {e}", path.display())));
    let pj: PointsJson = serde_json::from_str(&text)
        .unwrap_or_else(|e| usage_error(format!("bad points JSON: {e}")));
    pj.to_points().unwrap_or_else(|e| usage_error(e))
}

fn poly_json(p: &SparsePoly) -> Value {
    serde_json::to_value(PolyJson::from_poly(p)).expect("poly json")
}

fn dispatch(command: &Command, ctx: &Context, file_config: &FileConfig) -> Report {
    match command {
        Command::Info { group } => info_report(group, ctx),
        Command::Invariants { group } => invariants_report(group, ctx),
        Command::Jacobian { group, verify } => jacobian_report(group, *verify, ctx),
        Command::Discriminant { group } => discriminant_report(group, ctx),
        Command::Rewrite { group, poly } => rewrite_report(group, poly, ctx),
        Command::Gradient { group, poly } => gradient_report(group, poly, ctx),
        Command::Strata { group, check } => strata_report(group, *check, ctx),
        Command::Probe {
            group,
            s,
            alpha,
            ray,
            tmin,
            tmax,
            samples,
            csv,
        } => probe_report(
            group,
            *s,
            *alpha,
            ray.as_deref(),
            *tmin,
            *tmax,
            *samples,
            csv.as_deref(),
            ctx,
            file_config,
        ),
        Command::Jet { command } => jet_report(command, ctx),
        Command::Selftest { suite } => selftest_report(suite, ctx),
    }
}

fn info_report(group_str: &str, ctx: &Context) -> Report {
    let group = build(parse_group(group_str), ctx);
    let spec = group.spec();
    // involutions index the real forms of the complexified picture
    let real_forms = group.involutions().map(|v| v.len()).ok();
    Report {
        command: "info".into(),
        inputs: json!({ "group": group_str }),
        results: json!({
            "spec": spec.to_string(),
            "order": spec.order(),
            "reflections": group.reflections().len(),
            "degrees": spec.degrees(),
            "dimension": group.dim(),
            "field": group.field().to_string(),
            "real_forms": real_forms,
            "group": group.to_json(),
        }),
        exact: group.field().is_exact(),
        violations: Vec::new(),
        timing_ms: 0.0,
    }
}

fn invariants_report(group_str: &str, ctx: &Context) -> Report {
    let map = chevalley_map(group_str, ctx);
    Report {
        command: "invariants".into(),
        inputs: json!({ "group": group_str }),
        results: json!({
            "p": map.coordinates().iter().map(poly_json).collect::<Vec<_>>(),
            "k": map.degrees(),
            "d": map.reflection_count(),
            "s_j": map.minor_degrees(),
            "s": map.min_minor_degree(),
            "h": map.coxeter_number(),
        }),
        exact: map.group().field().is_exact(),
        violations: Vec::new(),
        timing_ms: 0.0,
    }
}

fn jacobian_report(group_str: &str, verify: bool, ctx: &Context) -> Report {
    let map = chevalley_map(group_str, ctx);
    let exact = map.group().field().is_exact();
    let mut violations = Vec::new();
    let results = if exact {
        let fact = map
            .jacobian_factorization()
            .unwrap_or_else(|e| usage_error(e));
        if verify {
            let mut prod = SparsePoly::constant(map.dim(), fact.c.clone());
            for f in &fact.factors {
                prod = prod.try_mul(f).expect("factor product");
            }
            if prod
                .try_sub(&map.jacobian_determinant())
                .map(|d| !d.is_zero())
                .unwrap_or(true)
            {
                violations.push("c·∏λ does not equal the Jacobian determinant".into());
            }
        }
        json!({
            "mode": "exact",
            "c": CoefJson::from_elem(&fact.c),
            "factors": fact.factors.iter().map(poly_json).collect::<Vec<_>>(),
            "factor_forms": fact.factors.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        })
    } else {
        let report = map.jacobian_numeric_check(100, ctx.tolerance, ctx.seed);
        if !report.pass {
            violations.push(format!(
                "numeric check failed: max |J − c∏λ| = {}",
                report.max_abs_error
            ));
        }
        json!({
            "mode": "numeric",
            "c": report.c,
            "points": report.points,
            "max_abs_error": report.max_abs_error,
            "tolerance": report.tolerance,
        })
    };
    Report {
        command: "jacobian".into(),
        inputs: json!({ "group": group_str, "verify": verify }),
        results,
        exact,
        violations,
        timing_ms: 0.0,
    }
}

fn discriminant_report(group_str: &str, ctx: &Context) -> Report {
    let map = chevalley_map(group_str, ctx);
    let delta = map.discriminant().unwrap_or_else(|e| usage_error(e));
    let mut violations = Vec::new();
    let j = map.jacobian_determinant();
    let j2 = j.try_mul(&j).expect("square");
    let recomposed = map.compose_with_basis(&delta).expect("compose");
    if recomposed
        .try_sub(&j2)
        .map(|d| !d.is_zero())
        .unwrap_or(true)
    {
        violations.push("Δ∘P does not equal J² exactly".into());
    }
    Report {
        command: "discriminant".into(),
        inputs: json!({ "group": group_str }),
        results: json!({ "delta": poly_json(&delta) }),
        exact: true,
        violations,
        timing_ms: 0.0,
    }
}

fn rewrite_report(group_str: &str, poly_path: &Path, ctx: &Context) -> Report {
    let map = chevalley_map(group_str, ctx);
    let f = load_poly(poly_path);
    let rewrite = map.rewrite_invariant(&f).unwrap_or_else(|e| usage_error(e));
    let mut violations = Vec::new();
    let back = map.compose_with_basis(&rewrite.target).expect("compose");
    if back.try_sub(&f).map(|d| !d.is_zero()).unwrap_or(true) {
        violations.push("compose(F, p) does not reproduce f exactly".into());
    }
    if let Some(deg) = f.degree().finite() {
        if rewrite.weighted_degree > deg {
            violations.push("weighted degree exceeds deg f".into());
        }
    }
    Report {
        command: "rewrite".into(),
        inputs: json!({ "group": group_str, "poly": poly_path.display().to_string() }),
        results: json!({
            "F": poly_json(&rewrite.target),
            "weighted_degree": rewrite.weighted_degree,
        }),
        exact: map.group().field().is_exact(),
        violations,
        timing_ms: 0.0,
    }
}

fn gradient_report(group_str: &str, poly_path: &Path, ctx: &Context) -> Report {
    let map = chevalley_map(group_str, ctx);
    let f = load_poly(poly_path);
    let g = map.gradient_system(&f).unwrap_or_else(|e| usage_error(e));
    let mut violations = Vec::new();
    // cross-check against the rewrite route
    let rewrite = map.rewrite_invariant(&f).unwrap_or_else(|e| usage_error(e));
    for (j, gj) in g.iter().enumerate() {
        let expect = map
            .compose_with_basis(&rewrite.target.differentiate(j))
            .expect("compose");
        if gj.try_sub(&expect).map(|d| !d.is_zero()).unwrap_or(true) {
            violations.push(format!("g_{} differs from (∂F/∂u_{})∘P", j + 1, j + 1));
        }
    }
    Report {
        command: "gradient".into(),
        inputs: json!({ "group": group_str, "poly": poly_path.display().to_string() }),
        results: json!({
            "g": g.iter().map(poly_json).collect::<Vec<_>>(),
        }),
        exact: true,
        violations,
        timing_ms: 0.0,
    }
}

fn strata_report(group_str: &str, check: StrataCheck, ctx: &Context) -> Report {
    let group = Arc::new(build(parse_group(group_str), ctx));
    let lattice = workbench_core::intersection_lattice(&group).unwrap_or_else(|e| usage_error(e));
    let mut violations = Vec::new();
    let strata_json: Vec<Value> = lattice
        .strata
        .iter()
        .map(|s| {
            json!({
                "codim": s.codim,
                "hyperplanes": s.hyperplanes.iter().collect::<Vec<_>>(),
                "isotropy": s.isotropy_type.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                "d_z": s.d_z,
                "s_z": s.s_z,
                "h_z": s.h_z,
            })
        })
        .collect();
    let mut results = json!({
        "strata": strata_json,
        "closure_pairs": lattice.closure_pairs,
    });
    if matches!(check, StrataCheck::Flatness | StrataCheck::All) {
        let map = basic_invariants(Arc::clone(&group)).unwrap_or_else(|e| usage_error(e));
        let flatness = workbench_core::strata::minor_flatness_check(&map, &lattice);
        violations.extend(flatness.violations.iter().cloned());
        results["flatness"] = json!({
            "rows": flatness.rows,
            "pass": flatness.pass(),
        });
    }
    if matches!(check, StrataCheck::Monotonicity | StrataCheck::All) {
        let mono = workbench_core::strata::monotonicity_check(&lattice);
        violations.extend(mono.violations.iter().cloned());
        results["monotonicity"] = json!({
            "rows": mono.rows,
            "pass": mono.pass(),
        });
    }
    Report {
        command: "strata".into(),
        inputs: json!({ "group": group_str, "check": format!("{check:?}").to_lowercase() }),
        results,
        exact: group.field().is_exact(),
        violations,
        timing_ms: 0.0,
    }
}

#[allow(clippy::too_many_arguments)]
fn probe_report(
    group_str: &str,
    s: u32,
    alpha: f64,
    ray: Option<&str>,
    tmin: Option<f64>,
    tmax: Option<f64>,
    samples: Option<usize>,
    csv: Option<&Path>,
    ctx: &Context,
    file_config: &FileConfig,
) -> Report {
    let map = chevalley_map(group_str, ctx);
    let ray_vec = ray.map(|spec| {
        spec.split(',')
            .map(|part| {
                part.trim()
                    .parse::<f64>()
                    .unwrap_or_else(|_| usage_error(format!("bad ray component {part:?}")))
            })
            .collect::<Vec<f64>>()
    });
    // flags win over config values, config over the built-in defaults
    let from_cfg = |key: &str| -> Option<f64> {
        file_config.get(key).map(|v| {
            v.parse()
                .unwrap_or_else(|_| usage_error(format!("bad {key} in config")))
        })
    };
    let config = ProbeConfig {
        s,
        alpha,
        ray: ray_vec,
        t_min: tmin.or_else(|| from_cfg("tmin")).unwrap_or(1e-3),
        t_max: tmax.or_else(|| from_cfg("tmax")).unwrap_or(1e-1),
        samples: samples
            .or_else(|| from_cfg("samples").map(|v| v as usize))
            .unwrap_or(25),
        dn_alternative_highest: true,
    };
    let report = whitney::counterexample_probe(&map, &config).unwrap_or_else(|e| usage_error(e));
    let mut violations = Vec::new();
    if !report.boundary_case {
        for fit in &report.orders {
            let want = report.expected_exponent_base - fit.k as f64;
            if (fit.slope - want).abs() > 0.05 {
                violations.push(format!(
                    "order {}: slope {} deviates from expected {want}",
                    fit.k, fit.slope
                ));
            }
        }
    }
    if let Some(path) = csv {
        let mut text = String::from("k,slope,residual,verdict\n");
        for fit in &report.orders {
            text.push_str(&format!(
                "{},{},{},{}\n",
                fit.k,
                fit.slope,
                fit.residual,
                fit.verdict.as_str()
            ));
        }
        std::fs::write(path, text)
            .unwrap_or_else(|e| usage_error(format!("cannot write CSV: {e}")));
    }
    Report {
        command: "probe".into(),
        inputs: json!({
            "group": group_str,
            "s": s,
            "alpha": alpha,
            "tmin": config.t_min,
            "tmax": config.t_max,
            "samples": config.samples,
        }),
        results: serde_json::to_value(&report).expect("probe json"),
        exact: false,
        violations,
        timing_ms: 0.0,
    }
}

fn jet_report(command: &JetCommand, _ctx: &Context) -> Report {
    match command {
        JetCommand::Taylor {
            poly,
            points,
            order,
        } => {
            let f = load_poly(poly);
            let pts = load_points(points);
            let jet = JetField::taylor(&f, &pts, *order).unwrap_or_else(|e| usage_error(e));
            let coeffs: Vec<Value> = (0..pts.len())
                .map(|i| {
                    let terms: Vec<Value> = whitney::multi_indices(f.nvars(), *order)
                        .iter()
                        .map(|k| {
                            json!({
                                "exp": k.0,
                                "value": CoefJson::from_elem(&jet.coeff(i, k)),
                            })
                        })
                        .collect();
                    json!({ "point_index": i, "terms": terms })
                })
                .collect();
            Report {
                command: "jet taylor".into(),
                inputs: json!({
                    "poly": poly.display().to_string(),
                    "points": points.display().to_string(),
                    "order": order,
                }),
                results: json!({ "coefficients": coeffs }),
                exact: f.field().is_exact(),
                violations: Vec::new(),
                timing_ms: 0.0,
            }
        }
        JetCommand::Seminorm {
            poly,
            points,
            order,
            reg,
        } => {
            if reg > order {
                usage_error("seminorm needs reg ≤ order");
            }
            let f = load_poly(poly);
            let pts = load_points(points);
            let jet = JetField::taylor(&f, &pts, *order).unwrap_or_else(|e| usage_error(e));
            let all: Vec<usize> = (0..pts.len()).collect();
            let value = jet.seminorm(&all, *reg).unwrap_or_else(|e| usage_error(e));
            Report {
                command: "jet seminorm".into(),
                inputs: json!({
                    "poly": poly.display().to_string(),
                    "points": points.display().to_string(),
                    "order": order,
                    "reg": reg,
                }),
                results: json!({ "seminorm": value }),
                exact: false,
                violations: Vec::new(),
                timing_ms: 0.0,
            }
        }
    }
}

fn selftest_report(suite_str: &str, ctx: &Context) -> Report {
    let suite = Suite::from_str(suite_str).unwrap_or_else(|e| usage_error(e));
    let reports = run_suite(suite, ctx.seed);
    let mut violations = Vec::new();
    for r in &reports {
        violations.extend(r.violations.iter().map(|v| format!("{}: {v}", r.suite)));
    }
    Report {
        command: "selftest".into(),
        inputs: json!({ "suite": suite_str, "seed": ctx.seed }),
        results: json!({
            "suites": reports
                .iter()
                .map(|r| json!({
                    "suite": r.suite,
                    "cases": r.cases,
                    "pass": r.pass(),
                }))
                .collect::<Vec<_>>(),
        }),
        exact: true,
        violations,
        timing_ms: 0.0,
    }
}
