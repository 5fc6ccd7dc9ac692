//! Built-in experiment runs. Each figure id names one end-to-end scenario:
//! a node system, a topology (or switched family), a coupling placed a fixed
//! offset from the computed critical value, seeded initial conditions, and
//! the integrator settings the published plots used.
//!
//! Everything is deterministic per base seed. Sub-streams are derived at
//! fixed offsets so changing the seed moves all random choices coherently:
//! initial conditions at `seed + 2000`, the switching schedule at
//! `seed + 1000`, and the five balanced digraph modes at `seed + 1..=5`.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use netstab_core::dynamics::{
    cubic_scalar, sprott_circulant, CouplingConfig, CouplingFunction, NetworkSystem,
    SprottNonlinearity,
};
use netstab_core::graph::Graph;
use netstab_core::lyapunov::{
    common_quadratic_condition, gershgorin_condition, lyapunov_decrease_along,
    non_positive_divergence_condition, ConditionReport,
};
use netstab_core::sim::{
    random_switching_signal, simulate_network, simulate_switched, IntegratorConfig, Method,
    SwitchedNetworkSystem, SwitchingSignal, Trajectory,
};
use netstab_core::spectral::{
    critical_coupling, necessary_condition_check, stability_verdict, LaplacianSign, NodeRegime,
    SpectralReport, DEFAULT_MARGIN_TOL,
};
use netstab_core::{Error, Result};

use crate::svg::{line_chart, Series};

/// Base seed for every randomized choice unless the caller overrides it.
pub const DEFAULT_SEED: u64 = 42;
/// Horizon of the slow Sprott-network runs.
pub const SPROTT_T_END: f64 = 2000.0;
/// Horizon of the switched-network runs.
pub const SWITCHED_T_END: f64 = 70.0;
/// Offset of the reproduction coupling from the computed critical value.
pub const COUPLING_OFFSET: f64 = 1e-3;
/// Minimum dwell time of the generated switching schedules.
pub const DWELL_MIN: f64 = 1.0;
/// Switch count of the generated schedules.
pub const NUM_SWITCHES: usize = 7;

/// The built-in experiment scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    /// Sprott network on the demo graph, diffusive coupling just below
    /// critical: decay to the synchronous origin.
    Fig1,
    /// Same network just above critical: sustained oscillation.
    Fig2,
    /// Marginal Sprott node, signless coupling just below critical.
    Fig4,
    /// Marginal Sprott node, signless coupling just above critical.
    Fig5,
    /// Cubic nodes under switched balanced digraphs, contracting coupling.
    Fig6,
    /// Cubic nodes under switched balanced digraphs, anti-diffusive coupling.
    Fig8,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig8 => "fig8",
        }
    }

    pub fn is_switched(self) -> bool {
        matches!(self, FigureId::Fig6 | FigureId::Fig8)
    }
}

impl std::str::FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fig1" | "1" => Ok(FigureId::Fig1),
            "fig2" | "2" => Ok(FigureId::Fig2),
            "fig4" | "4" => Ok(FigureId::Fig4),
            "fig5" | "5" => Ok(FigureId::Fig5),
            "fig6" | "6" => Ok(FigureId::Fig6),
            "fig8" | "8" => Ok(FigureId::Fig8),
            other => Err(Error::invalid(format!(
                "unknown figure {other:?}; expected one of fig1, fig2, fig4, fig5, fig6, fig8"
            ))),
        }
    }
}

/// Caller overrides for a figure run. `None` keeps the figure's published
/// setting.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub seed: u64,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub record_every: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: DEFAULT_SEED,
            t_end: None,
            dt: None,
            record_every: None,
        }
    }
}

/// Everything a finished figure run produced, ready for reporting.
#[derive(Clone, Debug)]
pub struct FigureRun {
    pub figure: FigureId,
    pub seed: u64,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_c: Option<f64>,
    pub node_dim: usize,
    pub n_nodes: usize,
    pub expect_stable: bool,
    pub initial_state: Vec<f64>,
    pub initial_norm: f64,
    pub trajectory: Trajectory,
    pub report: Option<SpectralReport>,
    pub conditions: Vec<ConditionReport>,
    /// Per-mode outcome of the necessary-condition screen (switched runs).
    pub necessary_condition: Vec<bool>,
    pub signal: Option<SwitchingSignal>,
    pub graphs: Vec<Graph>,
}

impl FigureRun {
    pub fn final_norm(&self) -> f64 {
        self.trajectory.final_norm()
    }

    pub fn diverged(&self) -> bool {
        self.trajectory.diverged
    }
}

/// Seeded initial condition, uniform on [-0.5, 0.5] per component.
pub fn initial_condition(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2000));
    (0..dim).map(|_| rng.random_range(-0.5..=0.5)).collect()
}

/// The five switched-topology modes: 4-node balanced digraphs built from
/// three edge-disjoint directed cycles each.
pub fn default_balanced_set(seed: u64) -> Result<Vec<Graph>> {
    (1..=5)
        .map(|k| Graph::random_balanced_digraph(4, 3, seed.wrapping_add(k)))
        .collect()
}

/// Runs one figure scenario end to end.
pub fn run_figure(figure: FigureId, opts: &RunOptions) -> Result<FigureRun> {
    if figure.is_switched() {
        run_switched_figure(figure, opts)
    } else {
        run_static_figure(figure, opts)
    }
}

fn run_static_figure(figure: FigureId, opts: &RunOptions) -> Result<FigureRun> {
    let (mu, sign, regime, offset_sign, expect_stable) = match figure {
        FigureId::Fig1 => (0.55, LaplacianSign::Minus, NodeRegime::StableNode, -1.0, true),
        FigureId::Fig2 => (0.55, LaplacianSign::Minus, NodeRegime::StableNode, 1.0, false),
        FigureId::Fig4 => (0.0, LaplacianSign::Plus, NodeRegime::UnstableNode, -1.0, true),
        FigureId::Fig5 => (0.0, LaplacianSign::Plus, NodeRegime::UnstableNode, 1.0, false),
        _ => unreachable!("switched figures take the other path"),
    };
    let node = sprott_circulant(mu, SprottNonlinearity::Tanh);
    let graph = Graph::demo4();
    let alpha_c = critical_coupling(&node, &graph, sign, regime)?;
    // Below alpha_c is the stable side in both regimes.
    let alpha = alpha_c + offset_sign * COUPLING_OFFSET;
    let beta = match sign {
        LaplacianSign::Minus => -alpha,
        LaplacianSign::Plus => alpha,
    };
    let coupling = CouplingConfig::identity(alpha, beta, node.dim())?;
    let report = stability_verdict(&node, &graph, &coupling, DEFAULT_MARGIN_TOL)?;
    let sys = NetworkSystem::new(graph.clone(), node, CouplingFunction::Linear(coupling))?;
    let cfg = IntegratorConfig {
        method: Method::Rk4,
        dt: opts.dt.unwrap_or(0.01),
        t_end: opts.t_end.unwrap_or(SPROTT_T_END),
        record_every: opts.record_every.unwrap_or(100),
        ..IntegratorConfig::default()
    };
    let x0 = initial_condition(sys.dim(), opts.seed);
    let initial_norm = netstab_core::sim::inf_norm(&x0);
    let trajectory = simulate_network(&sys, &x0, &cfg)?;
    Ok(FigureRun {
        figure,
        seed: opts.seed,
        alpha,
        beta,
        alpha_c: Some(alpha_c),
        node_dim: 3,
        n_nodes: 4,
        expect_stable,
        initial_state: x0,
        initial_norm,
        trajectory,
        report: Some(report),
        conditions: Vec::new(),
        necessary_condition: Vec::new(),
        signal: None,
        graphs: vec![graph],
    })
}

fn run_switched_figure(figure: FigureId, opts: &RunOptions) -> Result<FigureRun> {
    let (alpha, beta, expect_stable) = match figure {
        FigureId::Fig6 => (-1.0, -1.0, true),
        FigureId::Fig8 => (1.0, -1.0, false),
        _ => unreachable!("static figures take the other path"),
    };
    let node = cubic_scalar();
    let graphs = default_balanced_set(opts.seed)?;
    let coupling = CouplingConfig::identity(alpha, beta, node.dim())?;
    let mut conditions = vec![
        common_quadratic_condition(&graphs, alpha, beta),
        gershgorin_condition(&graphs, alpha, beta),
        non_positive_divergence_condition(&graphs, alpha),
    ];
    let necessary_condition: Vec<bool> = graphs
        .iter()
        .map(|g| necessary_condition_check(&node, g, &coupling))
        .collect::<Result<_>>()?;
    let sys = SwitchedNetworkSystem::new(
        graphs.clone(),
        node,
        CouplingFunction::Linear(coupling),
    )?;
    let t_end = opts.t_end.unwrap_or(SWITCHED_T_END);
    let signal = random_switching_signal(
        NUM_SWITCHES,
        t_end,
        DWELL_MIN,
        sys.num_modes(),
        opts.seed.wrapping_add(1000),
    )?;
    let cfg = IntegratorConfig {
        method: Method::Rk4,
        dt: opts.dt.unwrap_or(0.01),
        t_end,
        record_every: opts.record_every.unwrap_or(10),
        ..IntegratorConfig::default()
    };
    let x0 = initial_condition(sys.dim(), opts.seed);
    let initial_norm = netstab_core::sim::inf_norm(&x0);
    let trajectory = simulate_switched(&sys, &signal, &x0, &cfg)?;
    if !trajectory.diverged {
        conditions.push(lyapunov_decrease_along(&trajectory, sum_of_squares)?);
    }
    Ok(FigureRun {
        figure,
        seed: opts.seed,
        alpha,
        beta,
        alpha_c: None,
        node_dim: 1,
        n_nodes: 4,
        expect_stable,
        initial_state: x0,
        initial_norm,
        trajectory,
        report: None,
        conditions,
        necessary_condition,
        signal: Some(signal),
        graphs,
    })
}

/// The stacked quadratic V(x) = sum x_i^2 used by the switched-run audits.
pub fn sum_of_squares(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Writes the full output bundle of a run into `outdir` and returns the
/// paths written. Same seed, same bytes.
pub fn write_outputs(run: &FigureRun, outdir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(outdir)
        .map_err(|e| Error::invalid(format!("cannot create {}: {e}", outdir.display())))?;
    let mut written = Vec::new();

    let traj_path = outdir.join("trajectory.csv");
    write_file(&traj_path, &run.trajectory.to_csv(run.node_dim)?)?;
    written.push(traj_path);

    for k in 1..=run.node_dim {
        let csv_path = outdir.join(format!("channel_{k}.csv"));
        write_file(&csv_path, &channel_csv(run, k))?;
        written.push(csv_path);
        let svg_path = outdir.join(format!("channel_{k}.svg"));
        let chart = line_chart(
            &format!("{} channel {k}", run.figure.name()),
            "t",
            &format!("x_i_{k}"),
            &channel_series(run, k),
        );
        write_file(&svg_path, &chart)?;
        written.push(svg_path);
    }

    if run.node_dim == 3 {
        let svg_path = outdir.join("projection.svg");
        write_file(&svg_path, &projection_chart(run))?;
        written.push(svg_path);
    }

    let verdict_path = outdir.join("verdict.json");
    write_file(&verdict_path, &verdict_json(run))?;
    written.push(verdict_path);

    if let Some(signal) = &run.signal {
        let sig_path = outdir.join("switching.json");
        write_file(&sig_path, &signal.to_json())?;
        written.push(sig_path);
    }
    if run.graphs.len() > 1 {
        let gdir = outdir.join("graphs");
        fs::create_dir_all(&gdir)
            .map_err(|e| Error::invalid(format!("cannot create {}: {e}", gdir.display())))?;
        for (k, g) in run.graphs.iter().enumerate() {
            let gpath = gdir.join(format!("mode_{k}.txt"));
            write_file(&gpath, &g.serialize())?;
            written.push(gpath);
        }
    } else if let Some(g) = run.graphs.first() {
        let gpath = outdir.join("graph.txt");
        write_file(&gpath, &g.serialize())?;
        written.push(gpath);
    }

    Ok(written)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
}

/// CSV of one state channel across all nodes: `t,x_1_k,...,x_N_k`.
fn channel_csv(run: &FigureRun, k: usize) -> String {
    let mut out = String::from("t");
    for i in 1..=run.n_nodes {
        out.push_str(&format!(",x_{i}_{k}"));
    }
    out.push('\n');
    for (t, x) in run.trajectory.times.iter().zip(&run.trajectory.states) {
        out.push_str(&format!("{t}"));
        for i in 0..run.n_nodes {
            out.push_str(&format!(",{}", x[i * run.node_dim + (k - 1)]));
        }
        out.push('\n');
    }
    out.push_str(&format!("# diverged={}\n", run.trajectory.diverged));
    out
}

fn channel_series(run: &FigureRun, k: usize) -> Vec<Series> {
    (0..run.n_nodes)
        .map(|i| {
            let pts = run
                .trajectory
                .times
                .iter()
                .zip(&run.trajectory.states)
                .map(|(&t, x)| (t, x[i * run.node_dim + (k - 1)]))
                .collect();
            Series::new(format!("x_{}_{k}", i + 1), pts)
        })
        .collect()
}

/// Oblique plane projection of the three-channel node states, one curve per
/// node: (x1 + 0.35 x3, x2 + 0.35 x3).
fn projection_chart(run: &FigureRun) -> String {
    let series: Vec<Series> = (0..run.n_nodes)
        .map(|i| {
            let pts = run
                .trajectory
                .states
                .iter()
                .map(|x| {
                    let b = i * run.node_dim;
                    (x[b] + 0.35 * x[b + 2], x[b + 1] + 0.35 * x[b + 2])
                })
                .collect();
            Series::new(format!("node {}", i + 1), pts)
        })
        .collect();
    line_chart(
        &format!("{} state projection", run.figure.name()),
        "x1 + 0.35 x3",
        "x2 + 0.35 x3",
        &series,
    )
}

/// The summary report written next to the trajectory.
pub fn verdict_json(run: &FigureRun) -> String {
    let value = json!({
        "figure": run.figure.name(),
        "seed": run.seed,
        "alpha": run.alpha,
        "beta": run.beta,
        "alpha_c": run.alpha_c,
        "n_nodes": run.n_nodes,
        "node_dim": run.node_dim,
        "expect_stable": run.expect_stable,
        "t_end": run.trajectory.times.last().copied().unwrap_or(0.0),
        "initial_norm": run.initial_norm,
        "final_norm": run.final_norm(),
        "diverged": run.diverged(),
        "report": run.report.as_ref().map(|r| serde_json::to_value(r).expect("serializable")),
        "conditions": run.conditions.iter()
            .map(|c| serde_json::to_value(c).expect("serializable"))
            .collect::<Vec<_>>(),
        "necessary_condition": run.necessary_condition,
    });
    serde_json::to_string_pretty(&value).expect("verdict serialization cannot fail")
}
