//! `netstab`: stability analysis and simulation of diffusively coupled
//! dynamical networks.
//!
//! Exit codes: 0 on success, 2 on usage or input errors, 3 on numerical
//! failures (non-convergence, step underflow, divergence where stability
//! was expected).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use netstab_cli::experiments::{
    default_balanced_set, initial_condition, run_figure, verdict_json, write_outputs, FigureId,
    RunOptions, DEFAULT_SEED, NUM_SWITCHES, SWITCHED_T_END,
};
use netstab_cli::specs::{parse_graph_spec, parse_node_spec};
use netstab_core::dynamics::{CouplingConfig, CouplingFunction, NetworkSystem};
use netstab_core::graph::Graph;
use netstab_core::linalg::eigenvalues;
use netstab_core::lyapunov::{
    common_quadratic_condition, gershgorin_condition, non_positive_divergence_condition,
};
use netstab_core::sim::{
    random_switching_signal, simulate_network, simulate_switched, IntegratorConfig, Method,
    SwitchedNetworkSystem, SwitchingSignal, Trajectory,
};
use netstab_core::spectral::{
    critical_coupling, network_laplacian, stability_verdict, LaplacianSign, NodeRegime,
    DEFAULT_MARGIN_TOL,
};
use netstab_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "netstab",
    version,
    about = "Stability analysis and simulation of diffusively coupled dynamical networks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Base seed for every randomized choice (initial conditions, switching
    /// schedules, generated topologies).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (or file for `graph gen`); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Stdout report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Variant {
    /// Diffusive coupling, beta = -alpha (classical Laplacian D - A).
    Minus,
    /// Sign-preserving coupling, beta = alpha (signless Laplacian D + A).
    Plus,
}

impl Variant {
    fn sign(self) -> LaplacianSign {
        match self {
            Variant::Minus => LaplacianSign::Minus,
            Variant::Plus => LaplacianSign::Plus,
        }
    }

    fn default_beta(self, alpha: f64) -> f64 {
        match self {
            Variant::Minus => -alpha,
            Variant::Plus => alpha,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Rk4,
    Dp54,
}

#[derive(Subcommand)]
enum Cmd {
    /// Spectral analysis of the synchronous origin: critical coupling and,
    /// given a coupling strength, the full stability verdict.
    Analyze {
        /// Graph spec: demo4/fig3, path5, cycle6, star4, complete3,
        /// balanced:n,cycles,seed, or an edge-list file.
        #[arg(long)]
        graph: String,
        /// Node spec: sprott(mu=..., g=tanh|sin), cubic, or linear([[...]]).
        #[arg(long)]
        node: String,
        /// Coupling strength; omit to get the critical-coupling analysis only.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Coupling mix; defaults to the variant's ray (-alpha or +alpha).
        #[arg(long, allow_hyphen_values = true, requires = "alpha")]
        beta: Option<f64>,
        #[arg(long, value_enum, default_value_t = Variant::Minus)]
        variant: Variant,
        /// Verdict dead-band on the spectral margin.
        #[arg(long, default_value_t = DEFAULT_MARGIN_TOL)]
        tol: f64,
    },
    /// Re-run a built-in experiment and write its output bundle.
    Reproduce {
        /// fig1, fig2, fig4, fig5, fig6, fig8, or all.
        #[arg(long)]
        figure: Option<String>,
        /// JSON config file; explicit flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        record_every: Option<usize>,
    },
    /// Evaluate the switching-stability sufficient conditions on a family
    /// of topologies.
    Check {
        /// Graph spec; repeat for a family.
        #[arg(long = "graph")]
        graphs: Vec<String>,
        /// Built-in family: `fig7` (five seeded balanced digraphs).
        #[arg(long)]
        set: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Defaults to -alpha (diffusive coupling).
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
    },
    /// Generate or describe graphs.
    Graph {
        #[command(subcommand)]
        cmd: GraphCmd,
    },
    /// Integrate a static or switched network and emit the trajectory.
    Simulate {
        /// Graph spec; repeat to build a switched family.
        #[arg(long = "graph", required = true)]
        graphs: Vec<String>,
        #[arg(long)]
        node: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Defaults to -alpha (diffusive coupling).
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        /// Defaults to 10, or 70 for switched runs.
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, default_value_t = netstab_core::sim::DEFAULT_DT)]
        dt: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Rk4)]
        method: MethodArg,
        #[arg(long, default_value_t = 1e-8)]
        rtol: f64,
        #[arg(long, default_value_t = 1e-10)]
        atol: f64,
        #[arg(long, default_value_t = 1)]
        record_every: usize,
        /// Number of random switch times for multi-graph runs.
        #[arg(long, default_value_t = NUM_SWITCHES)]
        switches: usize,
        /// Minimum dwell time between switches.
        #[arg(long, default_value_t = 1.0)]
        tau_min: f64,
        /// Load the switching schedule from a JSON file instead of drawing it.
        #[arg(long)]
        signal: Option<PathBuf>,
        /// Comma-separated initial state; defaults to a seeded draw from
        /// [-0.5, 0.5] per component.
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
    },
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Generate a graph and print (or write) its edge list.
    Gen {
        /// path, cycle, star, complete, demo4, or balanced.
        #[arg(long)]
        family: String,
        /// Node count (ignored for demo4).
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Edge-disjoint directed cycles for the balanced family.
        #[arg(long, default_value_t = 3)]
        cycles: usize,
    },
    /// Summarize a graph: connectivity, bipartiteness, degrees, spectra.
    Info {
        /// Graph spec (same grammar as --graph elsewhere).
        spec: String,
    },
}

fn main() -> ExitCode {
    // Rust ignores SIGPIPE by default; restore the conventional CLI
    // behavior so `netstab ... | head` dies quietly instead of panicking.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_)
                | Error::Parse { .. }
                | Error::DimensionMismatch { .. } => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match cli.cmd {
        Cmd::Analyze {
            graph,
            node,
            alpha,
            beta,
            variant,
            tol,
        } => cmd_analyze(&graph, &node, alpha, beta, variant, tol, cli.format),
        Cmd::Reproduce {
            figure,
            config,
            t_end,
            dt,
            record_every,
        } => cmd_reproduce(
            figure,
            config,
            cli.seed,
            t_end,
            dt,
            record_every,
            cli.out,
            cli.format,
        ),
        Cmd::Check {
            graphs,
            set,
            alpha,
            beta,
        } => cmd_check(&graphs, set.as_deref(), alpha, beta, seed, cli.format),
        Cmd::Graph { cmd } => match cmd {
            GraphCmd::Gen { family, n, cycles } => {
                cmd_graph_gen(&family, n, cycles, seed, cli.out.as_deref())
            }
            GraphCmd::Info { spec } => cmd_graph_info(&spec),
        },
        Cmd::Simulate {
            graphs,
            node,
            alpha,
            beta,
            t_end,
            dt,
            method,
            rtol,
            atol,
            record_every,
            switches,
            tau_min,
            signal,
            x0,
        } => cmd_simulate(SimulateArgs {
            graphs,
            node,
            alpha,
            beta,
            t_end,
            dt,
            method,
            rtol,
            atol,
            record_every,
            switches,
            tau_min,
            signal,
            x0,
            seed,
            out: cli.out,
            format: cli.format,
        }),
    }
}

fn complex_pairs(v: &[num_complex::Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn print_kv_csv(pairs: &[(String, String)]) {
    println!("key,value");
    for (k, v) in pairs {
        println!("{k},{v}");
    }
}

fn json_to_kv(value: &serde_json::Value, prefix: &str, out: &mut Vec<(String, String)>) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                json_to_kv(v, &key, out);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                json_to_kv(v, &format!("{prefix}[{i}]"), out);
            }
        }
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn emit_report(value: &serde_json::Value, format: Format) {
    match format {
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(value).expect("report serialization cannot fail")
            )
        }
        Format::Csv => {
            let mut pairs = Vec::new();
            json_to_kv(value, "", &mut pairs);
            print_kv_csv(&pairs);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_analyze(
    graph: &str,
    node: &str,
    alpha: Option<f64>,
    beta: Option<f64>,
    variant: Variant,
    tol: f64,
    format: Format,
) -> Result<ExitCode> {
    let g = parse_graph_spec(graph)?;
    let nsys = parse_node_spec(node)?;
    let origin = vec![0.0; nsys.dim()];
    let node_spectrum = eigenvalues(&nsys.jacobian(&origin))?;
    let nu_max = node_spectrum
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);

    let lap = eigenvalues(&network_laplacian(&g, variant.sign()))?;
    let lambda_min = lap.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let lambda_max = lap.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let regime = if nu_max < 0.0 {
        NodeRegime::StableNode
    } else {
        NodeRegime::UnstableNode
    };
    let (alpha_c, alpha_c_error) = match critical_coupling(&nsys, &g, variant.sign(), regime) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let report = match alpha {
        Some(a) => {
            let b = beta.unwrap_or_else(|| variant.default_beta(a));
            let cfg = CouplingConfig::identity(a, b, nsys.dim())?;
            Some(stability_verdict(&nsys, &g, &cfg, tol)?)
        }
        None => None,
    };

    let value = json!({
        "graph": {
            "nodes": g.n(),
            "edges": g.edge_count(),
            "directed": g.is_directed(),
        },
        "node": nsys.name(),
        "node_dim": nsys.dim(),
        "node_spectrum": complex_pairs(&node_spectrum),
        "nu_max": nu_max,
        "variant": match variant { Variant::Minus => "minus", Variant::Plus => "plus" },
        "laplacian_spectrum": complex_pairs(&lap),
        "lambda_min": lambda_min,
        "lambda_max": lambda_max,
        "alpha_c": alpha_c,
        "alpha_c_error": alpha_c_error,
        "alpha": alpha,
        "report": report.as_ref().map(|r| serde_json::to_value(r).expect("serializable")),
    });
    emit_report(&value, format);
    Ok(ExitCode::SUCCESS)
}

#[derive(Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    figure: Option<String>,
    seed: Option<u64>,
    t_end: Option<f64>,
    dt: Option<f64>,
    record_every: Option<usize>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_reproduce(
    figure: Option<String>,
    config: Option<PathBuf>,
    seed: Option<u64>,
    t_end: Option<f64>,
    dt: Option<f64>,
    record_every: Option<usize>,
    out: Option<PathBuf>,
    format: Format,
) -> Result<ExitCode> {
    let file: FileConfig = match config {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::Parse {
                line: e.line(),
                message: e.to_string(),
            })?
        }
        None => FileConfig::default(),
    };
    let figure = figure
        .or(file.figure)
        .ok_or_else(|| Error::invalid("reproduce needs --figure or a config file naming one"))?;
    let opts = RunOptions {
        seed: seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        t_end: t_end.or(file.t_end),
        dt: dt.or(file.dt),
        record_every: record_every.or(file.record_every),
    };

    let figures: Vec<FigureId> = if figure.trim().eq_ignore_ascii_case("all") {
        FigureId::ALL.to_vec()
    } else {
        vec![figure.parse()?]
    };
    let base_out = out.unwrap_or_else(|| PathBuf::from("out"));

    let mut failed_stability = false;
    let mut summaries = Vec::new();
    for fig in &figures {
        let run = run_figure(*fig, &opts)?;
        let outdir = if figures.len() == 1 {
            base_out.clone()
        } else {
            base_out.join(fig.name())
        };
        write_outputs(&run, &outdir)?;
        if run.expect_stable && run.diverged() {
            eprintln!(
                "error: {} was expected to contract but the run diverged",
                fig.name()
            );
            failed_stability = true;
        }
        summaries.push((run, outdir));
    }

    match format {
        Format::Json => {
            let docs: Vec<serde_json::Value> = summaries
                .iter()
                .map(|(run, dir)| {
                    let mut v: serde_json::Value =
                        serde_json::from_str(&verdict_json(run)).expect("round-trip");
                    v["out"] = json!(dir.display().to_string());
                    v
                })
                .collect();
            let doc = if docs.len() == 1 {
                docs.into_iter().next().expect("nonempty")
            } else {
                serde_json::Value::Array(docs)
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("report serialization cannot fail")
            );
        }
        Format::Csv => {
            println!("figure,seed,alpha,beta,initial_norm,final_norm,diverged,out");
            for (run, dir) in &summaries {
                println!(
                    "{},{},{},{},{},{},{},{}",
                    run.figure.name(),
                    run.seed,
                    run.alpha,
                    run.beta,
                    run.initial_norm,
                    run.final_norm(),
                    run.diverged(),
                    dir.display()
                );
            }
        }
    }
    if failed_stability {
        Ok(ExitCode::from(3))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_check(
    graph_specs: &[String],
    set: Option<&str>,
    alpha: f64,
    beta: Option<f64>,
    seed: u64,
    format: Format,
) -> Result<ExitCode> {
    let mut graphs: Vec<Graph> = graph_specs
        .iter()
        .map(|s| parse_graph_spec(s))
        .collect::<Result<_>>()?;
    if let Some(name) = set {
        match name {
            "fig7" | "default" => graphs.extend(default_balanced_set(seed)?),
            other => {
                return Err(Error::invalid(format!(
                    "unknown set {other:?}; expected fig7"
                )))
            }
        }
    }
    if graphs.is_empty() {
        return Err(Error::invalid("check needs at least one --graph or --set"));
    }
    let beta = beta.unwrap_or(-alpha);
    let reports = vec![
        common_quadratic_condition(&graphs, alpha, beta),
        gershgorin_condition(&graphs, alpha, beta),
        non_positive_divergence_condition(&graphs, alpha),
    ];
    let all_passed = reports.iter().all(|r| r.passed);
    match format {
        Format::Json => {
            let value = json!({
                "alpha": alpha,
                "beta": beta,
                "num_graphs": graphs.len(),
                "all_passed": all_passed,
                "conditions": reports.iter()
                    .map(|r| serde_json::to_value(r).expect("serializable"))
                    .collect::<Vec<_>>(),
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("report serialization cannot fail")
            );
        }
        Format::Csv => {
            println!("condition,passed,worst_slack,note");
            for r in &reports {
                println!(
                    "{},{},{},{:?}",
                    r.condition, r.passed, r.worst_slack, r.note
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_graph_gen(
    family: &str,
    n: usize,
    cycles: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let g = match family {
        "path" => Graph::path(n)?,
        "cycle" => Graph::cycle(n)?,
        "star" => Graph::star(n)?,
        "complete" => Graph::complete(n)?,
        "demo4" | "fig3" => Graph::demo4(),
        "balanced" => Graph::random_balanced_digraph(n, cycles, seed)?,
        other => {
            return Err(Error::invalid(format!(
                "unknown family {other:?}; expected path, cycle, star, complete, demo4, balanced"
            )))
        }
    };
    let text = g.serialize();
    match out {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))?;
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn format_spectrum(eigs: &[num_complex::Complex64]) -> String {
    eigs.iter()
        .map(|z| {
            if z.im.abs() < 1e-12 {
                format!("{:.6}", z.re)
            } else {
                format!("{:.6}{:+.6}i", z.re, z.im)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_graph_info(spec: &str) -> Result<ExitCode> {
    let g = parse_graph_spec(spec)?;
    let (kin, kout) = g.degree_profile();
    let joined = |v: &[usize]| {
        v.iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    if g.is_directed() {
        let balanced = kin == kout;
        println!(
            "{}, {}, in-degrees {}, out-degrees {}",
            if g.is_connected() {
                "strongly connected"
            } else {
                "not strongly connected"
            },
            if balanced { "balanced" } else { "unbalanced" },
            joined(&kin),
            joined(&kout),
        );
    } else {
        println!(
            "{}, {}, degrees {}",
            if g.is_connected() {
                "connected"
            } else {
                "disconnected"
            },
            if g.is_bipartite() {
                "bipartite"
            } else {
                "non-bipartite"
            },
            joined(&kin),
        );
    }
    println!("nodes: {}", g.n());
    println!("edges: {}", g.edge_count());
    println!("directed: {}", g.is_directed());
    println!(
        "non_positive_divergence: {}",
        g.is_non_positive_divergence()
    );
    let minus = eigenvalues(&network_laplacian(&g, LaplacianSign::Minus))?;
    let plus = eigenvalues(&network_laplacian(&g, LaplacianSign::Plus))?;
    println!("diffusive laplacian spectrum: {}", format_spectrum(&minus));
    println!("signless laplacian spectrum: {}", format_spectrum(&plus));
    Ok(ExitCode::SUCCESS)
}

struct SimulateArgs {
    graphs: Vec<String>,
    node: String,
    alpha: f64,
    beta: Option<f64>,
    t_end: Option<f64>,
    dt: f64,
    method: MethodArg,
    rtol: f64,
    atol: f64,
    record_every: usize,
    switches: usize,
    tau_min: f64,
    signal: Option<PathBuf>,
    x0: Option<String>,
    seed: u64,
    out: Option<PathBuf>,
    format: Format,
}

fn parse_x0(text: &str, dim: usize) -> Result<Vec<f64>> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad initial component {f:?}")))
        })
        .collect::<Result<_>>()?;
    if vals.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: vals.len(),
        });
    }
    Ok(vals)
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode> {
    let graphs: Vec<Graph> = args
        .graphs
        .iter()
        .map(|s| parse_graph_spec(s))
        .collect::<Result<_>>()?;
    let node = parse_node_spec(&args.node)?;
    let node_dim = node.dim();
    let beta = args.beta.unwrap_or(-args.alpha);
    let coupling = CouplingConfig::identity(args.alpha, beta, node_dim)?;
    let switched = graphs.len() > 1 || args.signal.is_some();
    let t_end = args
        .t_end
        .unwrap_or(if switched { SWITCHED_T_END } else { 10.0 });
    let cfg = IntegratorConfig {
        method: match args.method {
            MethodArg::Rk4 => Method::Rk4,
            MethodArg::Dp54 => Method::Dp54,
        },
        dt: args.dt,
        rtol: args.rtol,
        atol: args.atol,
        t_end,
        record_every: args.record_every,
        ..IntegratorConfig::default()
    };

    let dim = node_dim * graphs[0].n();
    let x0 = match &args.x0 {
        Some(text) => parse_x0(text, dim)?,
        None => initial_condition(dim, args.seed),
    };

    let (trajectory, used_signal) = if switched {
        let sys = SwitchedNetworkSystem::new(
            graphs,
            node,
            CouplingFunction::Linear(coupling),
        )?;
        let signal = match &args.signal {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::invalid(format!("cannot read {}: {e}", path.display()))
                })?;
                let sig = SwitchingSignal::from_json(&text)?;
                sig.validate(t_end, sys.num_modes())?;
                sig
            }
            None => random_switching_signal(
                args.switches,
                t_end,
                args.tau_min,
                sys.num_modes(),
                args.seed.wrapping_add(1000),
            )?,
        };
        let traj = simulate_switched(&sys, &signal, &x0, &cfg)?;
        (traj, Some(signal))
    } else {
        let sys = NetworkSystem::new(
            graphs.into_iter().next().expect("required arg"),
            node,
            CouplingFunction::Linear(coupling),
        )?;
        (simulate_network(&sys, &x0, &cfg)?, None)
    };

    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| Error::invalid(format!("cannot create {}: {e}", dir.display())))?;
            let csv = trajectory.to_csv(node_dim)?;
            let path = dir.join("trajectory.csv");
            std::fs::write(&path, csv)
                .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))?;
            if let Some(sig) = &used_signal {
                let spath = dir.join("switching.json");
                std::fs::write(&spath, sig.to_json()).map_err(|e| {
                    Error::invalid(format!("cannot write {}: {e}", spath.display()))
                })?;
            }
            eprintln!(
                "wrote {} samples to {} (diverged={})",
                trajectory.times.len(),
                path.display(),
                trajectory.diverged
            );
        }
        None => match args.format {
            Format::Csv => print!("{}", trajectory.to_csv(node_dim)?),
            Format::Json => {
                let value = trajectory_json(&trajectory, used_signal.as_ref());
                println!(
                    "{}",
                    serde_json::to_string_pretty(&value)
                        .expect("trajectory serialization cannot fail")
                );
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn trajectory_json(traj: &Trajectory, signal: Option<&SwitchingSignal>) -> serde_json::Value {
    json!({
        "times": traj.times,
        "states": traj.states,
        "diverged": traj.diverged,
        "final_norm": traj.final_norm(),
        "signal": signal.map(|s| serde_json::to_value(s).expect("serializable")),
    })
}
