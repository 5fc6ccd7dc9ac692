//! Lyapunov-based certificates for switching stability: common quadratic
//! functions, quadratic-type function checks, degree-based sufficient
//! conditions over graph families, and numerical decrease audits along
//! simulated trajectories.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::NodeSystem;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{eigenvalues, kron, RealMatrix};
use crate::sim::Trajectory;

pub type ScalarField = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradientField = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Quadratic Lyapunov function `v(x) = x' P x` with `P` symmetric positive
/// definite.
#[derive(Clone, Debug)]
pub struct QuadraticLF {
    p: RealMatrix,
}

impl QuadraticLF {
    pub fn new(p: RealMatrix) -> Result<Self> {
        if !p.is_square() {
            return Err(Error::invalid("P must be square"));
        }
        if p.symmetry_defect() > 1e-12 {
            return Err(Error::invalid("P must be symmetric to 1e-12"));
        }
        let min_eig = eigenvalues(&p)?
            .iter()
            .map(|z| z.re)
            .fold(f64::INFINITY, f64::min);
        if !(min_eig > 0.0) {
            return Err(Error::numerical(format!(
                "P is not positive definite (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self { p })
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.p.rows()
    }

    /// `x' P x` for a single node state.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let px = self.p.matvec(x);
        x.iter().zip(&px).map(|(a, b)| a * b).sum()
    }

    /// `sum_i x_i' P x_i` over a stacked network state.
    pub fn evaluate_stacked(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        assert_eq!(x.len() % d, 0, "stacked state must be a multiple of dim");
        x.chunks(d).map(|xi| self.evaluate(xi)).sum()
    }
}

/// Solves `A'P + PA = -I` through the vectorized d^2 x d^2 linear system.
/// Node dimensions are small here, so no Schur-based machinery is needed.
pub fn solve_node_lyapunov(a: &RealMatrix) -> Result<QuadraticLF> {
    if !a.is_square() {
        return Err(Error::invalid("A must be square"));
    }
    let d = a.rows();
    let spectrum = eigenvalues(a)?;
    let max_re = spectrum.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if max_re >= 0.0 {
        return Err(Error::NotHurwitz(max_re));
    }
    let at = a.transpose();
    let id = RealMatrix::identity(d);
    // row-major vectorization: vec(A'P) = (A' ox I) vec(P), vec(PA) = (I ox A') vec(P)
    let system = kron(&at, &id).add(&kron(&id, &at));
    let mut rhs = vec![0.0; d * d];
    for i in 0..d {
        rhs[i * d + i] = -1.0;
    }
    let sol = system.solve(&rhs)?;
    let mut p = RealMatrix::new(d, d, sol)?;
    p = p.add(&p.transpose()).scale(0.5);
    let residual = at.matmul(&p).add(&p.matmul(a)).add(&id).inf_norm();
    if residual > 1e-9 {
        return Err(Error::numerical(format!(
            "Lyapunov residual {residual:e} exceeds 1e-9; A is too close to marginal"
        )));
    }
    QuadraticLF::new(p)
}

/// Scalar function `V` on node states together with the comparison
/// functions and constants of a quadratic-type Lyapunov candidate:
/// `lambda1(|x|) <= V(x) <= lambda2(|x|)`, `gradV . f <= -c1 gamma(|x|)^2`,
/// `|gradV| <= c2 gamma(|x|)`, and `gamma(r) <= delta r` below radius `a`.
#[derive(Clone)]
pub struct QuadraticTypeLF {
    pub v: ScalarField,
    pub grad_v: GradientField,
    pub gamma: ScalarFn,
    pub lambda1: ScalarFn,
    pub lambda2: ScalarFn,
    pub c1: f64,
    pub c2: f64,
    pub a: f64,
    pub delta: f64,
}

impl QuadraticTypeLF {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        v: ScalarField,
        grad_v: GradientField,
        gamma: ScalarFn,
        lambda1: ScalarFn,
        lambda2: ScalarFn,
        c1: f64,
        c2: f64,
        a: f64,
        delta: f64,
    ) -> Result<Self> {
        for (name, val) in [("c1", c1), ("c2", c2), ("a", a), ("delta", delta)] {
            if !(val.is_finite() && val > 0.0) {
                return Err(Error::invalid(format!("{name} must be finite and positive")));
            }
        }
        Ok(Self {
            v,
            grad_v,
            gamma,
            lambda1,
            lambda2,
            c1,
            c2,
            a,
            delta,
        })
    }
}

/// Per-graph slack vector inside a [`ConditionReport`]. For graph-family
/// conditions the entries are per node; for trajectory audits they are per
/// recorded step.
#[derive(Clone, Debug, Serialize)]
pub struct GraphSlack {
    pub graph: usize,
    pub slacks: Vec<f64>,
    pub worst: f64,
}

/// Outcome of a sufficient-condition check. `passed` holds exactly when
/// every slack is nonnegative (up to the check's stated tolerance);
/// `failing_nodes` lists (graph, node) pairs with negative slack.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub passed: bool,
    pub note: String,
    pub per_graph: Vec<GraphSlack>,
    pub failing_nodes: Vec<(usize, usize)>,
    pub worst_slack: f64,
    pub worst_point: Option<Vec<f64>>,
}

impl ConditionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    fn from_slacks(
        condition: &str,
        per_graph: Vec<GraphSlack>,
        mut notes: Vec<String>,
    ) -> Self {
        let mut failing = Vec::new();
        let mut worst = f64::INFINITY;
        for gs in &per_graph {
            for (i, &s) in gs.slacks.iter().enumerate() {
                worst = worst.min(s);
                if s < 0.0 {
                    failing.push((gs.graph, i));
                }
            }
        }
        if worst == f64::INFINITY {
            worst = f64::NEG_INFINITY;
            notes.push("empty graph list".into());
        }
        let passed = failing.is_empty() && notes.is_empty();
        let note = if passed {
            "all hypotheses hold".into()
        } else {
            notes.join("; ")
        };
        ConditionReport {
            condition: condition.into(),
            passed,
            note,
            per_graph,
            failing_nodes: failing,
            worst_slack: worst,
            worst_point: None,
        }
    }
}

fn slack_vector(g: &Graph, f: impl Fn(usize) -> f64) -> (Vec<f64>, f64) {
    let slacks: Vec<f64> = (0..g.n()).map(f).collect();
    let worst = slacks.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    (slacks, worst)
}

/// Common quadratic Lyapunov certificate over a family of topologies:
/// passes when `alpha < 0`, `|alpha| >= |beta|`, and every graph is
/// undirected. Directed graphs and parameter violations are reported as
/// sentinel slack -1 on the offending nodes.
pub fn common_quadratic_condition(graphs: &[Graph], alpha: f64, beta: f64) -> ConditionReport {
    let mut notes = Vec::new();
    if !(alpha < 0.0) {
        notes.push(format!("alpha must be negative, got {alpha}"));
    } else if alpha.abs() < beta.abs() {
        notes.push(format!("|alpha| >= |beta| violated: |{alpha}| < |{beta}|"));
    }
    let mut per_graph = Vec::with_capacity(graphs.len());
    for (gi, g) in graphs.iter().enumerate() {
        let value = if !(alpha < 0.0) || g.is_directed() {
            -1.0
        } else {
            alpha.abs() - beta.abs()
        };
        if g.is_directed() {
            notes.push(format!("graph {gi} is directed"));
        }
        let (slacks, worst) = slack_vector(g, |_| value);
        per_graph.push(GraphSlack {
            graph: gi,
            slacks,
            worst,
        });
    }
    ConditionReport::from_slacks("common_quadratic", per_graph, notes)
}

/// Degree condition backing the quadratic-type certificate: passes when
/// `alpha < 0` and `2|alpha| k_in >= |beta| (k_in + k_out)` at every node
/// of every graph. On undirected graphs this is exactly the common
/// quadratic condition; on digraphs it weighs in- against out-degrees.
pub fn gershgorin_condition(graphs: &[Graph], alpha: f64, beta: f64) -> ConditionReport {
    let mut notes = Vec::new();
    if !(alpha < 0.0) {
        notes.push(format!("alpha must be negative, got {alpha}"));
    }
    let mut per_graph = Vec::with_capacity(graphs.len());
    let mut any_negative = false;
    for (gi, g) in graphs.iter().enumerate() {
        let (slacks, worst) = slack_vector(g, |i| {
            if !(alpha < 0.0) {
                return -1.0;
            }
            let kin = g.in_degree(i) as f64;
            let kout = g.out_degree(i) as f64;
            2.0 * alpha.abs() * kin - beta.abs() * (kin + kout)
        });
        any_negative |= worst < 0.0;
        per_graph.push(GraphSlack {
            graph: gi,
            slacks,
            worst,
        });
    }
    if any_negative && alpha < 0.0 {
        notes.push("degree inequality fails at the listed nodes".into());
    }
    ConditionReport::from_slacks("gershgorin_degree", per_graph, notes)
}

/// Non-positive-divergence sufficient condition: passes when `alpha < 0`
/// and every node of every graph has out-degree at most its in-degree.
/// Slack per node is `k_in - k_out`.
pub fn non_positive_divergence_condition(graphs: &[Graph], alpha: f64) -> ConditionReport {
    let mut notes = Vec::new();
    if !(alpha < 0.0) {
        notes.push(format!("alpha must be negative, got {alpha}"));
    }
    let mut per_graph = Vec::with_capacity(graphs.len());
    let mut any_negative = false;
    for (gi, g) in graphs.iter().enumerate() {
        let (slacks, worst) = slack_vector(g, |i| {
            if !(alpha < 0.0) {
                return -1.0;
            }
            g.in_degree(i) as f64 - g.out_degree(i) as f64
        });
        any_negative |= worst < 0.0;
        per_graph.push(GraphSlack {
            graph: gi,
            slacks,
            worst,
        });
    }
    if any_negative && alpha < 0.0 {
        notes.push("some node sends to more neighbors than it hears from".into());
    }
    ConditionReport::from_slacks("non_positive_divergence", per_graph, notes)
}

/// Tolerance for sampled functional inequalities.
const SAMPLE_TOL: f64 = -1e-10;

/// Samples the quadratic-type inequalities at seeded points in the ball of
/// the given radius. Radii are log-uniform over eight decades below the
/// radius so near-origin violations are caught; directions are isotropic.
/// Passes iff every sampled slack clears -1e-10.
pub fn quadratic_type_check(
    lf: &QuadraticTypeLF,
    node: &NodeSystem,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<ConditionReport> {
    if !(radius.is_finite() && radius > 0.0 && radius < lf.a) {
        return Err(Error::invalid(format!(
            "radius must lie in (0, a); got {radius} with a = {}",
            lf.a
        )));
    }
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let d = node.dim();
    let origin = vec![0.0; d];
    let v0 = (lf.v)(&origin);
    if v0.abs() > 1e-12 {
        return Ok(ConditionReport {
            condition: "quadratic_type".into(),
            passed: false,
            note: format!("V(0) = {v0:e}, must vanish at the origin"),
            per_graph: vec![],
            failing_nodes: vec![],
            worst_slack: -v0.abs(),
            worst_point: Some(origin),
        });
    }

    let labels = [
        "lower sandwich lambda1(|x|) <= V(x)",
        "upper sandwich V(x) <= lambda2(|x|)",
        "decrease gradV.f <= -c1 gamma(|x|)^2",
        "gradient bound |gradV| <= c2 gamma(|x|)",
        "sublinearity gamma(r) <= delta r",
    ];
    let mut worst_by_kind = [f64::INFINITY; 5];
    let mut worst_slack = f64::INFINITY;
    let mut worst_point: Option<Vec<f64>> = None;
    let mut slacks = Vec::with_capacity(samples);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let rho = radius * 10f64.powf(-8.0 * rng.random::<f64>());
        let x = random_ball_point(&mut rng, d, rho);
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let v = (lf.v)(&x);
        let grad = (lf.grad_v)(&x);
        let f = node.eval(&x);
        let vdot: f64 = grad.iter().zip(&f).map(|(a, b)| a * b).sum();
        let grad_norm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
        let gam = (lf.gamma)(r);
        let point_slacks = [
            v - (lf.lambda1)(r),
            (lf.lambda2)(r) - v,
            -vdot - lf.c1 * gam * gam,
            lf.c2 * gam - grad_norm,
            lf.delta * r - (lf.gamma)(r),
        ];
        let mut point_worst = f64::INFINITY;
        for (k, &s) in point_slacks.iter().enumerate() {
            worst_by_kind[k] = worst_by_kind[k].min(s);
            point_worst = point_worst.min(s);
        }
        slacks.push(point_worst);
        if point_worst < worst_slack {
            worst_slack = point_worst;
            worst_point = Some(x);
        }
    }
    let violated: Vec<&str> = labels
        .iter()
        .zip(&worst_by_kind)
        .filter(|(_, &w)| w < SAMPLE_TOL)
        .map(|(l, _)| *l)
        .collect();
    let passed = violated.is_empty();
    let worst = slacks.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    Ok(ConditionReport {
        condition: "quadratic_type".into(),
        passed,
        note: if passed {
            "all sampled inequalities hold".into()
        } else {
            format!("violated: {}", violated.join("; "))
        },
        per_graph: vec![GraphSlack {
            graph: 0,
            slacks,
            worst,
        }],
        failing_nodes: vec![],
        worst_slack,
        worst_point: if passed { None } else { worst_point },
    })
}

fn random_ball_point(rng: &mut ChaCha8Rng, d: usize, rho: f64) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..d).map(|_| gaussian(rng)).collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return g.iter().map(|v| v / norm * rho).collect();
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Evaluates `V` at every recorded sample and checks the sequence never
/// increases by more than `1e-9 * max |V|`. Slacks are the per-step
/// decrements `V(k) - V(k+1)`.
pub fn lyapunov_decrease_along(
    traj: &Trajectory,
    v: impl Fn(&[f64]) -> f64,
) -> Result<ConditionReport> {
    if traj.diverged {
        return Err(Error::invalid(
            "trajectory diverged; decrease audit needs a complete run",
        ));
    }
    if traj.states.len() < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let values: Vec<f64> = traj.states.iter().map(|x| v(x)).collect();
    let vmax = values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let tol = 1e-9 * vmax;
    let mut slacks = Vec::with_capacity(values.len() - 1);
    let mut failing = Vec::new();
    let mut worst_slack = f64::INFINITY;
    let mut worst_point = None;
    for (k, w) in values.windows(2).enumerate() {
        let dec = w[0] - w[1];
        slacks.push(dec);
        if dec < -tol {
            failing.push((0usize, k));
            if dec < worst_slack {
                worst_point = Some(traj.states[k + 1].clone());
            }
        }
        worst_slack = worst_slack.min(dec);
    }
    let passed = failing.is_empty();
    let worst = worst_slack;
    Ok(ConditionReport {
        condition: "lyapunov_decrease".into(),
        passed,
        note: if passed {
            format!("nonincreasing over {} samples (tolerance {tol:e})", values.len())
        } else {
            format!(
                "{} increase(s) beyond tolerance {tol:e}, first at step {}",
                failing.len(),
                failing[0].1
            )
        },
        per_graph: vec![GraphSlack {
            graph: 0,
            slacks,
            worst,
        }],
        failing_nodes: failing,
        worst_slack,
        worst_point,
    })
}
