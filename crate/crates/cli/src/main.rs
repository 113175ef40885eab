//! Command-line driver.
//!
//! Subcommands:
//! - `solve`:   the variational rate for one instance over (p, eta/t) grids
//! - `tail`:    oracle estimates of the tail probability (exact / MC / both)
//! - `certify`: the exponential-tilting lower-bound certificate
//! - `check`:   theorem suites (triangles at p=1/2, sandwich, AP demo)
//! - `audit`:   degree and density diagnostics for an instance
//!
//! Exit code 0 iff every inequality asserted by the run passed.

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use lowertail::formats::{EstimateJson, HypergraphJson, PatternJson, SolutionJson};
use lowertail::harness::{
    self, ap_demo, rows_to_csv, run_experiment, sandwich_check, sandwich_rows_to_csv,
    theorem_triangles_check, triangle_rows_to_csv, ExperimentConfig, InstanceSpec, OracleChoice,
    OracleConfig, TailGrid,
};
use lowertail_core::builders::{
    self, ap_hypergraph, copy_hypergraph, degree_bound_audit, s_density, PatternHypergraph,
};
use lowertail_core::oracle::{exact_lower_tail, mc_lower_tail, EXACT_BUDGET};
use lowertail_core::variational::{solve_phi, TailSpec};
use lowertail_core::WeightedHypergraph;
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "lowertail",
    about = "Mean-field lower-tail rates for weighted uniform hypergraphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Raw hypergraph JSON file: {"r":..,"v":..,"edges":[{"A":[..],"d":..}]}
    #[arg(long, conflicts_with_all = ["pattern", "ap"])]
    hypergraph: Option<PathBuf>,
    /// Pattern JSON file: {"s":..,"v":..,"edges":[[..],..]} (needs --n)
    #[arg(long, conflicts_with = "ap")]
    pattern: Option<PathBuf>,
    /// Host size n for a pattern instance
    #[arg(long)]
    n: Option<usize>,
    /// Arithmetic progressions: K,N
    #[arg(long, value_parser = parse_pair)]
    ap: Option<(usize, usize)>,
}

impl InstanceArgs {
    fn resolve(&self) -> anyhow::Result<InstanceSpec> {
        if let Some(path) = &self.hypergraph {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let json: HypergraphJson = serde_json::from_str(&text)?;
            let h = json.to_hypergraph()?;
            return Ok(InstanceSpec::Raw { id: stem(path), h });
        }
        if let Some(path) = &self.pattern {
            let n = self.n.context("--pattern needs --n (host size)")?;
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let json: PatternJson = serde_json::from_str(&text)?;
            return Ok(InstanceSpec::Pattern {
                id: stem(path),
                pattern: json.to_pattern()?,
                n,
            });
        }
        if let Some((k, n)) = self.ap {
            return Ok(InstanceSpec::Ap { k, n });
        }
        bail!("need one of --hypergraph, --pattern (with --n), or --ap K,N");
    }
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Retention probabilities, comma-separated
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    p: Vec<f64>,
    /// Relative tail levels eta, comma-separated
    #[arg(long, value_delimiter = ',', conflicts_with = "t")]
    eta: Option<Vec<f64>>,
    /// Absolute thresholds t, comma-separated
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
}

impl GridArgs {
    fn tail_grid(&self) -> TailGrid {
        match (&self.eta, &self.t) {
            (_, Some(ts)) => TailGrid::Thresholds(ts.clone()),
            (Some(es), None) => TailGrid::Etas(es.clone()),
            (None, None) => TailGrid::Etas(vec![0.5]),
        }
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output path (stdout when absent); JSON sidecar lands next to CSV
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the variational rate for one instance
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 0.3)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate tail probabilities with the chosen oracle(s)
    Tail {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value = "exact", value_parser = ["exact", "mc", "both"])]
        oracle: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Produce the tilted lower-bound certificate
    Certify {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0.5)]
        eta: f64,
        #[arg(long, default_value_t = 0.3)]
        epsilon: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a theorem suite
    Check {
        /// triangles | sandwich | ap (defaults by instance kind)
        #[arg(long)]
        suite: Option<String>,
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Host sizes for the triangles suite
        #[arg(long = "host-n", value_delimiter = ',', default_value = "5")]
        host_n: Vec<usize>,
        #[arg(long, default_value_t = 0.3)]
        epsilon: f64,
        #[arg(long, default_value = "exact", value_parser = ["exact", "mc", "both"])]
        oracle: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Degree and density report for an instance
    Audit {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 0.3)]
        epsilon: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected K,N".into());
    }
    let k = parts[0].trim().parse().map_err(|e| format!("bad K: {e}"))?;
    let n = parts[1].trim().parse().map_err(|e| format!("bad N: {e}"))?;
    Ok((k, n))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into())
}

fn parse_oracle(s: &str) -> OracleChoice {
    match s {
        "mc" => OracleChoice::Mc,
        "both" => OracleChoice::Both,
        _ => OracleChoice::Exact,
    }
}

fn emit(output: &OutputArgs, csv: String, json: impl Serialize) -> anyhow::Result<()> {
    let body = if output.format == "json" {
        serde_json::to_string_pretty(&json)?
    } else {
        csv
    };
    match &output.out {
        Some(path) => {
            std::fs::write(path, body)?;
            if output.format == "csv" {
                let sidecar = path.with_extension("sidecar.json");
                std::fs::write(sidecar, serde_json::to_string_pretty(&json)?)?;
            }
        }
        None => {
            if body.ends_with('\n') {
                print!("{body}");
            } else {
                println!("{body}");
            }
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(all_passed) => {
            if !all_passed {
                std::process::exit(1);
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Solve {
            instance,
            grid,
            output,
            epsilon,
            seed,
        } => {
            let config = ExperimentConfig {
                instance: instance.resolve()?,
                p_grid: grid.p.clone(),
                tail_grid: grid.tail_grid(),
                epsilon,
                oracle: OracleChoice::Exact,
                samples: 10_000,
                seed,
            };
            // solve-only view: skip oracles on instances beyond the budget
            let h = config.instance.build()?;
            let mut solutions: Vec<serde_json::Value> = Vec::new();
            let mut pass = true;
            for &p in &config.p_grid {
                for (eta, t, spec) in tail_specs(&grid)? {
                    let sol = solve_phi(&h, p, spec)?;
                    pass &= sol.kkt_residual.is_finite();
                    solutions.push(serde_json::json!({
                        "instance": config.instance.id(),
                        "p": p,
                        "eta": eta,
                        "t": t,
                        "solution": SolutionJson::from_solution(&sol),
                    }));
                }
            }
            let mut csv = String::from("instance,p,eta,t,phi,theta,status,kkt_residual\n");
            for s in &solutions {
                use std::fmt::Write as _;
                let sol = &s["solution"];
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{}",
                    s["instance"].as_str().unwrap_or(""),
                    s["p"],
                    s["eta"],
                    s["t"],
                    sol["phi"],
                    sol["theta"],
                    sol["status"].as_str().unwrap_or(""),
                    sol["kkt_residual"],
                );
            }
            emit(&output, csv, solutions)?;
            Ok(pass)
        }
        Command::Tail {
            instance,
            grid,
            output,
            oracle,
            samples,
            seed,
        } => {
            let spec = instance.resolve()?;
            let h = spec.build()?;
            let oracle = parse_oracle(&oracle);
            let mut estimates: Vec<serde_json::Value> = Vec::new();
            let mut pass = true;
            for &p in &grid.p {
                for (eta, t, tail) in tail_specs(&grid)? {
                    let mut row: Vec<EstimateJson> = Vec::new();
                    if oracle.wants_exact() {
                        if h.vertex_count() <= EXACT_BUDGET {
                            row.push(EstimateJson::from_estimate(&exact_lower_tail(&h, p, tail)?));
                        } else if oracle == OracleChoice::Exact {
                            bail!(
                                "exact oracle budget exceeded: {} vertices",
                                h.vertex_count()
                            );
                        }
                    }
                    if oracle.wants_mc() {
                        row.push(EstimateJson::from_estimate(&mc_lower_tail(
                            &h, p, tail, samples, seed,
                        )?));
                    }
                    // cross-oracle coherence when both present
                    if row.len() == 2 {
                        if let Some((lo, hi)) = row[1].ci {
                            pass &= lo <= row[0].log_prob && row[0].log_prob <= hi;
                        }
                    }
                    estimates.push(serde_json::json!({
                        "instance": spec.id(),
                        "p": p,
                        "eta": eta,
                        "t": t,
                        "estimates": row,
                    }));
                }
            }
            let mut csv =
                String::from("instance,p,eta,t,method,log_prob,ci_low,ci_high,samples,seed\n");
            for e in &estimates {
                use std::fmt::Write as _;
                for est in e["estimates"].as_array().unwrap() {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{},{},{},{},{}",
                        e["instance"].as_str().unwrap_or(""),
                        e["p"],
                        e["eta"],
                        e["t"],
                        est["method"].as_str().unwrap_or(""),
                        est["log_prob"],
                        est["ci"].get(0).unwrap_or(&serde_json::Value::Null),
                        est["ci"].get(1).unwrap_or(&serde_json::Value::Null),
                        est["samples"],
                        est["seed"],
                    );
                }
            }
            emit(&output, csv, estimates)?;
            Ok(pass)
        }
        Command::Certify {
            instance,
            p,
            eta,
            epsilon,
            samples,
            seed,
            output,
        } => {
            let spec = instance.resolve()?;
            let h = spec.build()?;
            let cert = harness::tilt_certificate_for(&h, p, eta, epsilon, samples, seed)?;
            let mut pass = true;
            let exact = if h.vertex_count() <= EXACT_BUDGET {
                let est = exact_lower_tail(&h, p, TailSpec::relative(eta)?)?;
                pass &= cert.log_lower_bound <= est.log_prob + 1e-9;
                Some(est.log_prob)
            } else {
                None
            };
            let json = serde_json::json!({
                "instance": spec.id(),
                "p": p,
                "eta": eta,
                "epsilon": cert.epsilon,
                "phi_hat": cert.phi_hat,
                "k_var": cert.k_var,
                "c_prime": cert.c_prime,
                "c": cert.c,
                "log_lower_bound": cert.log_lower_bound,
                "tilted_mass": cert.empirical_y1y2,
                "exact_probability": cert.exact_probability,
                "exact_log_prob": exact,
                "q_star": cert.q_star.values(),
            });
            let csv = format!(
                "instance,p,eta,epsilon,phi_hat,k_var,c_prime,c,log_lower_bound,tilted_mass,exact,exact_log_prob\n{},{},{},{},{},{},{},{},{},{},{},{}\n",
                spec.id(), p, eta, cert.epsilon, cert.phi_hat, cert.k_var, cert.c_prime, cert.c,
                cert.log_lower_bound, cert.empirical_y1y2, cert.exact_probability,
                exact.map(|x| x.to_string()).unwrap_or_default(),
            );
            emit(&output, csv, json)?;
            Ok(pass)
        }
        Command::Check {
            suite,
            instance,
            grid,
            output,
            host_n,
            epsilon,
            oracle,
            samples,
            seed,
        } => {
            let suite = suite.unwrap_or_else(|| {
                if instance.ap.is_some() {
                    "ap".into()
                } else if instance.hypergraph.is_some() || instance.pattern.is_some() {
                    "sandwich".into()
                } else {
                    "triangles".into()
                }
            });
            match suite.as_str() {
                "triangles" => {
                    let mut all = Vec::new();
                    for &n in &host_n {
                        let t_grid: Vec<f64> = match &grid.t {
                            Some(ts) => ts.clone(),
                            None => {
                                let max_t = n * (n - 1) * (n - 2) / 6;
                                (0..=max_t).map(|t| t as f64).collect()
                            }
                        };
                        all.extend(theorem_triangles_check(n, &t_grid)?);
                    }
                    let pass = all.iter().all(|r| r.holds);
                    emit(&output, triangle_rows_to_csv(&all), all)?;
                    Ok(pass)
                }
                "sandwich" => {
                    let spec = instance.resolve()?;
                    let h = spec.build()?;
                    let id = spec.id();
                    let etas = match grid.tail_grid() {
                        TailGrid::Etas(es) => es,
                        TailGrid::Thresholds(_) => bail!("sandwich suite needs --eta"),
                    };
                    let mut reports = Vec::new();
                    for &p in &grid.p {
                        for &eta in &etas {
                            reports.push(sandwich_check(
                                &h,
                                &id,
                                p,
                                eta,
                                epsilon,
                                OracleConfig {
                                    choice: parse_oracle(&oracle),
                                    samples,
                                    seed,
                                },
                            )?);
                        }
                    }
                    let pass = reports.iter().all(|r| r.pass());
                    emit(&output, sandwich_rows_to_csv(&reports), reports)?;
                    Ok(pass)
                }
                "report" => {
                    // full batch driver: one row per (p, eta/t) with solver,
                    // certificates, oracle estimates, and pass/fail flags
                    let config = ExperimentConfig {
                        instance: instance.resolve()?,
                        p_grid: grid.p.clone(),
                        tail_grid: grid.tail_grid(),
                        epsilon,
                        oracle: parse_oracle(&oracle),
                        samples,
                        seed,
                    };
                    let rows = run_experiment(&config)?;
                    let pass = rows.iter().all(|r| r.pass());
                    let sidecar: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|r| {
                            serde_json::json!({
                                "row": r,
                                "solution": r.sidecar_solution,
                                "estimates": r.sidecar_estimates,
                            })
                        })
                        .collect();
                    emit(&output, rows_to_csv(&rows), sidecar)?;
                    Ok(pass)
                }
                "ap" => {
                    let Some((k, n)) = instance.ap else {
                        bail!("ap suite needs --ap K,N");
                    };
                    let etas = match grid.tail_grid() {
                        TailGrid::Etas(es) => es,
                        TailGrid::Thresholds(_) => bail!("ap suite needs --eta"),
                    };
                    let mut demos = Vec::new();
                    for &p in &grid.p {
                        demos.push(ap_demo(
                            k,
                            n,
                            p,
                            &etas,
                            epsilon,
                            OracleConfig {
                                choice: parse_oracle(&oracle),
                                samples,
                                seed,
                            },
                        )?);
                    }
                    let pass = demos.iter().all(|d| d.pass());
                    let mut csv = String::new();
                    for d in &demos {
                        csv.push_str(&format!(
                            "# ap k={} n={} delta1={}<= {} delta2={} <= {} audit={}\n",
                            d.k,
                            d.n,
                            d.delta1_observed,
                            d.delta1_bound,
                            d.delta2_observed,
                            d.delta2_bound,
                            d.degree_audit_holds
                        ));
                        csv.push_str(&sandwich_rows_to_csv(&d.rows));
                    }
                    emit(&output, csv, demos)?;
                    Ok(pass)
                }
                other => bail!("unknown suite {other} (triangles|sandwich|ap|report)"),
            }
        }
        Command::Audit {
            instance,
            p,
            epsilon,
            output,
        } => {
            let spec = instance.resolve()?;
            let json = match &spec {
                InstanceSpec::Pattern { pattern, n, .. } => audit_pattern(pattern, *n, p, epsilon)?,
                InstanceSpec::Ap { k, n } => audit_ap(*k, *n)?,
                InstanceSpec::Raw { h, .. } => audit_raw(h, p, epsilon)?,
            };
            let pass = json["holds"].as_bool().unwrap_or(true);
            let csv = format!("{}\n", serde_json::to_string(&json)?);
            emit(&output, csv, json)?;
            Ok(pass)
        }
    }
}

fn tail_specs(grid: &GridArgs) -> anyhow::Result<Vec<lowertail::harness::TailLevel>> {
    Ok(match grid.tail_grid() {
        TailGrid::Etas(es) => es
            .iter()
            .map(|&e| TailSpec::relative(e).map(|s| (Some(e), None, s)))
            .collect::<Result<_, _>>()?,
        TailGrid::Thresholds(ts) => ts
            .iter()
            .map(|&t| TailSpec::absolute(t).map(|s| (None, Some(t), s)))
            .collect::<Result<_, _>>()?,
    })
}

fn audit_pattern(
    pattern: &PatternHypergraph,
    n: usize,
    p: Option<f64>,
    epsilon: f64,
) -> anyhow::Result<serde_json::Value> {
    let audit = degree_bound_audit(pattern, n)?;
    let density = s_density(pattern)?;
    let aut = if pattern.vertex_count() <= 8 {
        Some(builders::automorphism_count(pattern)?)
    } else {
        None
    };
    let mut value = serde_json::json!({
        "kind": "pattern",
        "n": n,
        "s": pattern.uniformity(),
        "v_pattern": pattern.vertex_count(),
        "e_pattern": pattern.edge_count(),
        "automorphisms": aut,
        "density": density.value.to_string(),
        "density_float": density.value.to_f64(),
        "achieving_vertices": density.achieving_vertices,
        "delta1": audit.delta_1,
        "delta1_formula": audit.delta_1_formula,
        "degree_rows": audit.rows.iter().map(|r| serde_json::json!({
            "u": r.u, "delta_u": r.delta_u, "bound": r.bound, "slack": r.slack,
        })).collect::<Vec<_>>(),
        "holds": audit.holds,
    });
    if let Some(p) = p {
        let h = copy_hypergraph(pattern, n)?;
        value["degree_condition"] = degree_condition_json(&h, p, epsilon)?;
    }
    Ok(value)
}

fn audit_ap(k: usize, n: usize) -> anyhow::Result<serde_json::Value> {
    let h = ap_hypergraph(k, n)?;
    let delta1 = h.max_degree(1);
    let delta2 = h.max_degree(2.min(k));
    Ok(serde_json::json!({
        "kind": "ap",
        "k": k,
        "n": n,
        "v": h.vertex_count(),
        "e": h.total_weight(),
        "delta1": delta1,
        "delta1_bound": (k * n) as f64,
        "delta2": delta2,
        "delta2_bound": (k * (k - 1) / 2) as f64,
        "holds": delta1 <= (k * n) as f64 && delta2 <= (k * (k - 1) / 2) as f64,
    }))
}

fn audit_raw(
    h: &WeightedHypergraph,
    p: Option<f64>,
    epsilon: f64,
) -> anyhow::Result<serde_json::Value> {
    let deltas: Vec<f64> = (1..=h.uniformity()).map(|s| h.max_degree(s)).collect();
    let mut value = serde_json::json!({
        "kind": "raw",
        "v": h.vertex_count(),
        "e": h.total_weight(),
        "r": h.uniformity(),
        "delta_s": deltas,
        "holds": true,
    });
    if let Some(p) = p {
        value["degree_condition"] = degree_condition_json(h, p, epsilon)?;
        value["holds"] = value["degree_condition"]["holds"].clone();
    }
    Ok(value)
}

fn degree_condition_json(
    h: &WeightedHypergraph,
    p: f64,
    epsilon: f64,
) -> anyhow::Result<serde_json::Value> {
    let k = h.vertex_count() as f64 * h.max_degree(1) / h.total_weight();
    let (lambda, c) = builders::theorem_constants(h.uniformity(), p, epsilon, k)?;
    let report = h.degree_condition_check(p, k, lambda)?;
    Ok(serde_json::json!({
        "K": k,
        "lambda": lambda,
        "C": c,
        "holds": report.holds,
        "worst_s": report.worst_s,
        "ratio": report.ratio,
        "per_s": report.per_s.iter().map(|(s, d, r)| serde_json::json!({
            "s": s, "delta_s": d, "ratio": r,
        })).collect::<Vec<_>>(),
    }))
}
