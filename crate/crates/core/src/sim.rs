//! ODE integration of static and switched networks.
//!
//! Two integrators: classical fixed-step RK4 and adaptive Dormand-Prince
//! 5(4) with a PI step controller. Switched runs integrate segment by
//! segment so that every switch time lands exactly on the grid; the state is
//! continuous across switches and each boundary is recorded exactly once.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{CouplingFunction, NetworkSystem, NodeSystem};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Nominal step for fixed-step runs and initial step for adaptive ones.
pub const DEFAULT_DT: f64 = 0.01;
/// State norm beyond which a run is declared diverged and halted.
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1e6;
/// Adaptive steps below this are reported as step-size underflow.
const MIN_STEP: f64 = 1e-14;
/// Hard cap on attempted steps, to keep pathological fields from spinning.
const MAX_ATTEMPTS_PER_SEGMENT: usize = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Dp54,
}

#[derive(Clone, Debug)]
pub struct IntegratorConfig {
    pub method: Method,
    /// RK4 nominal step; DP54 initial step.
    pub dt: f64,
    /// DP54 relative tolerance (unused by RK4).
    pub rtol: f64,
    /// DP54 absolute tolerance (unused by RK4).
    pub atol: f64,
    pub t_end: f64,
    /// Record every k-th accepted step; boundaries and the final sample are
    /// always recorded regardless.
    pub record_every: usize,
    pub divergence_threshold: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk4,
            dt: DEFAULT_DT,
            rtol: 1e-8,
            atol: 1e-10,
            t_end: 10.0,
            record_every: 1,
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
        }
    }
}

impl IntegratorConfig {
    fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dt must be finite and positive"));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::invalid("t_end must be finite and positive"));
        }
        if self.record_every == 0 {
            return Err(Error::invalid("record_every must be at least 1"));
        }
        if !(self.rtol >= 0.0 && self.atol >= 0.0 && self.rtol + self.atol > 0.0) {
            return Err(Error::invalid("tolerances must be nonnegative, not both zero"));
        }
        if !(self.divergence_threshold > 0.0) {
            return Err(Error::invalid("divergence threshold must be positive"));
        }
        Ok(())
    }
}

/// Recorded solution samples. `states[k]` is the stacked state at
/// `times[k]`; `diverged` marks a run halted by the divergence guard, in
/// which case the last sample is the offending state.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub diverged: bool,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory always holds the initial sample")
    }

    /// Max-norm of the final sample.
    pub fn final_norm(&self) -> f64 {
        inf_norm(self.final_state())
    }

    /// Max-norm of every sample.
    pub fn norms_inf(&self) -> Vec<f64> {
        self.states.iter().map(|x| inf_norm(x)).collect()
    }

    /// Euclidean norm of every sample.
    pub fn norms_l2(&self) -> Vec<f64> {
        self.states
            .iter()
            .map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }

    /// CSV with header `t,x_1_1,...,x_N_d` (node-major columns, 1-based)
    /// and a trailing `# diverged=` comment line. `node_dim` must divide
    /// the state dimension.
    pub fn to_csv(&self, node_dim: usize) -> Result<String> {
        let dim = self.dim();
        if node_dim == 0 || dim % node_dim != 0 {
            return Err(Error::invalid(format!(
                "node_dim {node_dim} does not divide state dimension {dim}"
            )));
        }
        let n_nodes = dim / node_dim;
        let mut out = String::from("t");
        for i in 1..=n_nodes {
            for k in 1..=node_dim {
                out.push_str(&format!(",x_{i}_{k}"));
            }
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            out.push_str(&format!("{t}"));
            for v in x {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("# diverged={}\n", self.diverged));
        Ok(out)
    }

    /// Parses the `to_csv` format back. The `# diverged=` trailer is
    /// optional and defaults to false.
    pub fn parse_csv(text: &str) -> Result<Trajectory> {
        let mut times = Vec::new();
        let mut states = Vec::new();
        let mut diverged = false;
        let mut ncols: Option<usize> = None;
        let mut saw_header = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(flag) = rest.strip_prefix("diverged=") {
                    diverged = flag.trim().parse::<bool>().map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("bad diverged flag {flag:?}"),
                    })?;
                }
                continue;
            }
            if !saw_header {
                if !line.starts_with("t,") && line != "t" {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "header must start with column t".into(),
                    });
                }
                ncols = Some(line.split(',').count());
                saw_header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if Some(fields.len()) != ncols {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!(
                        "expected {} columns, got {}",
                        ncols.unwrap(),
                        fields.len()
                    ),
                });
            }
            let mut vals = Vec::with_capacity(fields.len());
            for f in &fields {
                vals.push(f.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("bad number {f:?}"),
                })?);
            }
            times.push(vals[0]);
            states.push(vals[1..].to_vec());
        }
        if !saw_header || times.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "no samples".into(),
            });
        }
        Ok(Trajectory {
            times,
            states,
            diverged,
        })
    }
}

pub fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

struct Recorder {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    every: usize,
}

impl Recorder {
    fn push(&mut self, t: f64, x: &[f64]) {
        self.times.push(t);
        self.states.push(x.to_vec());
    }
}

/// Integrates `dx/dt = f(t, x)` from `x0` over `[0, cfg.t_end]`.
pub fn integrate<F>(mut f: F, x0: &[f64], cfg: &IntegratorConfig) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    cfg.validate()?;
    if x0.is_empty() || x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("initial state must be nonempty and finite"));
    }
    let mut rec = Recorder {
        times: Vec::new(),
        states: Vec::new(),
        every: cfg.record_every,
    };
    let mut x = x0.to_vec();
    rec.push(0.0, &x);
    let diverged = match cfg.method {
        Method::Rk4 => rk4_segment(&mut f, 0.0, cfg.t_end, &mut x, cfg, &mut rec)?,
        Method::Dp54 => dp54_segment(&mut f, 0.0, cfg.t_end, &mut x, cfg, &mut rec)?,
    };
    Ok(Trajectory {
        times: rec.times,
        states: rec.states,
        diverged,
    })
}

/// One fixed-step RK4 pass over `[t0, t1]`. Steps: `n = max(1,
/// round(len/dt))` with `h = len/n`, so the segment end is always hit
/// exactly. Returns true if the divergence guard fired.
fn rk4_segment<F>(
    f: &mut F,
    t0: f64,
    t1: f64,
    x: &mut Vec<f64>,
    cfg: &IntegratorConfig,
    rec: &mut Recorder,
) -> Result<bool>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let len = t1 - t0;
    let n = ((len / cfg.dt).round() as usize).max(1);
    let h = len / n as f64;
    let dim = x.len();
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];
    for i in 1..=n {
        let t = t0 + (i - 1) as f64 * h;
        f(t, x, &mut k1);
        for j in 0..dim {
            tmp[j] = x[j] + 0.5 * h * k1[j];
        }
        f(t + 0.5 * h, &tmp, &mut k2);
        for j in 0..dim {
            tmp[j] = x[j] + 0.5 * h * k2[j];
        }
        f(t + 0.5 * h, &tmp, &mut k3);
        for j in 0..dim {
            tmp[j] = x[j] + h * k3[j];
        }
        f(t + h, &tmp, &mut k4);
        for j in 0..dim {
            x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let tc = if i == n { t1 } else { t0 + i as f64 * h };
        let norm = inf_norm(x);
        if !norm.is_finite() || norm > cfg.divergence_threshold {
            rec.push(tc, x);
            return Ok(true);
        }
        if i == n || i % rec.every == 0 {
            rec.push(tc, x);
        }
    }
    Ok(false)
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order weights are row 7 of A (FSAL); E is the difference to the
// embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One adaptive DP54 pass over `[t0, t1]` with PI step control
/// (safety 0.9, growth in [0.2, 5], order exponent 0.17, memory 0.04).
fn dp54_segment<F>(
    f: &mut F,
    t0: f64,
    t1: f64,
    x: &mut Vec<f64>,
    cfg: &IntegratorConfig,
    rec: &mut Recorder,
) -> Result<bool>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let dim = x.len();
    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; dim]).collect();
    let mut stage = vec![0.0; dim];
    let mut xnew = vec![0.0; dim];
    let mut t = t0;
    let mut h = cfg.dt.min(t1 - t0);
    let mut facold: f64 = 1e-4;
    let mut just_rejected = false;
    let mut accepted_steps = 0usize;
    f(t, x, &mut k[0]);
    let mut attempts = 0usize;
    while t < t1 {
        attempts += 1;
        if attempts > MAX_ATTEMPTS_PER_SEGMENT {
            return Err(Error::numerical("step budget exhausted"));
        }
        if h < MIN_STEP {
            return Err(Error::StepUnderflow { t });
        }
        let mut last = false;
        if t + h >= t1 {
            h = t1 - t;
            last = true;
        }
        for s in 1..7 {
            for j in 0..dim {
                let mut acc = 0.0;
                for (q, kq) in k.iter().enumerate().take(s) {
                    acc += A[s][q] * kq[j];
                }
                stage[j] = x[j] + h * acc;
            }
            f(t + C[s] * h, &stage, &mut k[s]);
        }
        // fifth-order solution is the last stage argument
        xnew.copy_from_slice(&stage);
        let mut err_acc = 0.0;
        for j in 0..dim {
            let mut e = 0.0;
            for (q, kq) in k.iter().enumerate() {
                e += E[q] * kq[j];
            }
            e *= h;
            let sk = cfg.atol + cfg.rtol * x[j].abs().max(xnew[j].abs());
            let r = e / sk;
            err_acc += r * r;
        }
        let err = (err_acc / dim as f64).sqrt();
        if err.is_finite() && err <= 1.0 {
            t = if last { t1 } else { t + h };
            std::mem::swap(x, &mut xnew);
            k.swap(0, 6); // FSAL: last stage derivative becomes next first
            accepted_steps += 1;
            let norm = inf_norm(x);
            if !norm.is_finite() || norm > cfg.divergence_threshold {
                rec.push(t, x);
                return Ok(true);
            }
            if last || accepted_steps % rec.every == 0 {
                rec.push(t, x);
            }
            // PI update reads the previous accepted error before it is replaced.
            let fac11 = err.powf(0.17);
            let mut fac = fac11 / facold.powf(0.04);
            let lower = if just_rejected { 1.0 } else { 0.2 };
            fac = (fac / 0.9).clamp(lower, 5.0);
            h /= fac;
            facold = err.max(1e-4);
            just_rejected = false;
        } else if err.is_finite() {
            let fac11 = err.powf(0.17);
            h /= (fac11 / 0.9).min(5.0);
            just_rejected = true;
        } else {
            h *= 0.1;
            just_rejected = true;
        }
    }
    Ok(false)
}

/// Integrates a static network from stacked initial state `x0`.
pub fn simulate_network(
    sys: &NetworkSystem,
    x0: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if x0.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: x0.len(),
        });
    }
    integrate(|_t, x, out| sys.field_into(x, out), x0, cfg)
}

/// Piecewise-constant mode schedule. `modes[k]` is active on
/// `[switch_times[k-1], switch_times[k])`, with `switch_times` strictly
/// increasing inside `(0, t_end)`; there is always one more mode than
/// switch time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchingSignal {
    pub seed: u64,
    pub switch_times: Vec<f64>,
    pub modes: Vec<usize>,
}

impl SwitchingSignal {
    pub fn num_switches(&self) -> usize {
        self.switch_times.len()
    }

    /// Structural checks against a horizon and a mode count.
    pub fn validate(&self, t_end: f64, num_modes: usize) -> Result<()> {
        if self.modes.len() != self.switch_times.len() + 1 {
            return Err(Error::invalid(format!(
                "{} modes for {} switch times; need exactly one more mode",
                self.modes.len(),
                self.switch_times.len()
            )));
        }
        let mut prev = 0.0;
        for (k, &t) in self.switch_times.iter().enumerate() {
            if !(t.is_finite() && t > prev && t < t_end) {
                return Err(Error::invalid(format!(
                    "switch time {k} = {t} outside (previous, t_end)"
                )));
            }
            prev = t;
        }
        if let Some(&m) = self.modes.iter().find(|&&m| m >= num_modes) {
            return Err(Error::invalid(format!(
                "mode index {m} out of range for {num_modes} modes"
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("signal serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }
}

/// Draws a schedule with `num_switches` switch times on `(0, t_end)`, every
/// dwell interval (including before the first and after the last switch) at
/// least `tau_min`, and uniformly random modes with no immediate repeats.
///
/// Times come from the standard uniform-spacings construction: sorted
/// uniforms on the slack interval, shifted by multiples of `tau_min`.
pub fn random_switching_signal(
    num_switches: usize,
    t_end: f64,
    tau_min: f64,
    num_modes: usize,
    seed: u64,
) -> Result<SwitchingSignal> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::invalid("t_end must be finite and positive"));
    }
    if !(tau_min.is_finite() && tau_min >= 0.0) {
        return Err(Error::invalid("tau_min must be finite and nonnegative"));
    }
    if num_modes == 0 {
        return Err(Error::invalid("need at least one mode"));
    }
    if num_modes == 1 && num_switches > 0 {
        return Err(Error::invalid(
            "cannot switch without repeats when only one mode exists",
        ));
    }
    let slack = t_end - (num_switches + 1) as f64 * tau_min;
    if slack < 0.0 {
        return Err(Error::invalid(format!(
            "horizon {t_end} cannot fit {} dwell intervals of {tau_min}",
            num_switches + 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut offsets: Vec<f64> = (0..num_switches)
        .map(|_| rng.random_range(0.0..=slack))
        .collect();
    offsets.sort_by(f64::total_cmp);
    let switch_times: Vec<f64> = offsets
        .iter()
        .enumerate()
        .map(|(k, u)| u + (k + 1) as f64 * tau_min)
        .collect();
    let mut modes = Vec::with_capacity(num_switches + 1);
    modes.push(rng.random_range(0..num_modes));
    for _ in 0..num_switches {
        let prev = *modes.last().expect("nonempty");
        let mut attempts = 0;
        loop {
            let m = rng.random_range(0..num_modes);
            if m != prev {
                modes.push(m);
                break;
            }
            attempts += 1;
            if attempts > 1000 {
                return Err(Error::ExhaustedAttempts(1000));
            }
        }
    }
    Ok(SwitchingSignal {
        seed,
        switch_times,
        modes,
    })
}

/// A family of network modes sharing node dynamics and coupling, differing
/// only in topology. All graphs must be connected and on the same node set.
#[derive(Clone, Debug)]
pub struct SwitchedNetworkSystem {
    systems: Vec<NetworkSystem>,
}

impl SwitchedNetworkSystem {
    pub fn new(graphs: Vec<Graph>, node: NodeSystem, coupling: CouplingFunction) -> Result<Self> {
        if graphs.is_empty() {
            return Err(Error::invalid("need at least one graph mode"));
        }
        let n = graphs[0].n();
        for (k, g) in graphs.iter().enumerate() {
            if g.n() != n {
                return Err(Error::invalid(format!(
                    "graph {k} has {} nodes, expected {n}",
                    g.n()
                )));
            }
            if !g.is_connected() {
                return Err(Error::invalid(format!("graph {k} is not connected")));
            }
        }
        let systems = graphs
            .into_iter()
            .map(|g| NetworkSystem::new(g, node.clone(), coupling.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { systems })
    }

    pub fn num_modes(&self) -> usize {
        self.systems.len()
    }

    pub fn mode(&self, k: usize) -> &NetworkSystem {
        &self.systems[k]
    }

    pub fn dim(&self) -> usize {
        self.systems[0].dim()
    }
}

/// Integrates a switched network under `signal` over `[0, cfg.t_end]`.
/// Each dwell interval gets its own step grid (RK4 rounds the nominal step
/// to fit; DP54 restarts from the nominal step), so switch times are hit
/// exactly. Step counting for `record_every` restarts at each boundary.
pub fn simulate_switched(
    sys: &SwitchedNetworkSystem,
    signal: &SwitchingSignal,
    x0: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    signal.validate(cfg.t_end, sys.num_modes())?;
    if x0.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: x0.len(),
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("initial state must be finite"));
    }
    let mut boundaries = Vec::with_capacity(signal.switch_times.len() + 2);
    boundaries.push(0.0);
    boundaries.extend_from_slice(&signal.switch_times);
    boundaries.push(cfg.t_end);

    let mut rec = Recorder {
        times: Vec::new(),
        states: Vec::new(),
        every: cfg.record_every,
    };
    let mut x = x0.to_vec();
    rec.push(0.0, &x);
    let mut diverged = false;
    for (seg, mode) in signal.modes.iter().enumerate() {
        let t0 = boundaries[seg];
        let t1 = boundaries[seg + 1];
        let net = sys.mode(*mode);
        let mut f = |_t: f64, y: &[f64], out: &mut [f64]| net.field_into(y, out);
        diverged = match cfg.method {
            Method::Rk4 => rk4_segment(&mut f, t0, t1, &mut x, cfg, &mut rec)?,
            Method::Dp54 => dp54_segment(&mut f, t0, t1, &mut x, cfg, &mut rec)?,
        };
        if diverged {
            break;
        }
    }
    Ok(Trajectory {
        times: rec.times,
        states: rec.states,
        diverged,
    })
}

/// Exponential envelope `||x(t)|| <= amplitude * exp(-rate * t)` fitted to
/// one or more trajectories.
#[derive(Clone, Copy, Debug)]
pub struct DecayEnvelope {
    /// Decay rate, clamped to be nonnegative.
    pub rate: f64,
    /// Smallest prefactor making the envelope hold at every sample.
    pub amplitude: f64,
}

/// Pools all samples, fits log Euclidean norm against time by least
/// squares, and inflates the prefactor until the envelope dominates every
/// sample. Zero-norm samples are skipped.
pub fn estimate_decay_envelope(trajectories: &[&Trajectory]) -> Result<DecayEnvelope> {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for tr in trajectories {
        for (t, x) in tr.times.iter().zip(&tr.states) {
            let n2 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n2 > 1e-300 {
                pts.push((*t, n2.ln()));
            }
        }
    }
    if pts.len() < 2 {
        return Err(Error::invalid("need at least two nonzero samples"));
    }
    let n = pts.len() as f64;
    let st: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let stt: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sty: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * stt - st * st;
    if denom <= 0.0 {
        return Err(Error::invalid("samples must span more than one time point"));
    }
    let slope = (n * sty - st * sy) / denom;
    let rate = (-slope).max(0.0);
    let log_amp = pts
        .iter()
        .map(|(t, y)| y + rate * t)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(DecayEnvelope {
        rate,
        amplitude: log_amp.exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{
        cubic_scalar, linear_node, sprott_circulant, CouplingConfig, SprottNonlinearity,
    };
    use crate::linalg::RealMatrix;

    fn decay_field(_t: f64, x: &[f64], out: &mut [f64]) {
        out[0] = -x[0];
    }

    fn rotation_field(_t: f64, x: &[f64], out: &mut [f64]) {
        out[0] = x[1];
        out[1] = -x[0];
    }

    #[test]
    fn rk4_exponential_decay() {
        let cfg = IntegratorConfig {
            t_end: 1.0,
            ..Default::default()
        };
        let tr = integrate(decay_field, &[1.0], &cfg).unwrap();
        assert!(!tr.diverged);
        assert_eq!(*tr.times.last().unwrap(), 1.0);
        assert!((tr.final_state()[0] - (-1.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn rk4_cubic_closed_form() {
        // x' = -x^3 from 1 has x(t) = 1/sqrt(1+2t)
        let cfg = IntegratorConfig {
            t_end: 4.0,
            ..Default::default()
        };
        let tr = integrate(|_t, x, out| out[0] = -x[0].powi(3), &[1.0], &cfg).unwrap();
        assert!((tr.final_state()[0] - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn rk4_empirical_order_is_four() {
        let exact = (1.0f64.cos(), -(1.0f64.sin()));
        let err = |dt: f64| {
            let cfg = IntegratorConfig {
                dt,
                t_end: 1.0,
                record_every: usize::MAX,
                ..Default::default()
            };
            let tr = integrate(rotation_field, &[1.0, 0.0], &cfg).unwrap();
            let f = tr.final_state();
            ((f[0] - exact.0).powi(2) + (f[1] - exact.1).powi(2)).sqrt()
        };
        let e1 = err(0.05);
        let e2 = err(0.025);
        let order = (e1 / e2).log2();
        assert!((3.7..=4.3).contains(&order), "observed order {order}");
    }

    #[test]
    fn dp54_meets_tolerance() {
        let cfg = IntegratorConfig {
            method: Method::Dp54,
            rtol: 1e-8,
            atol: 1e-10,
            t_end: 10.0,
            record_every: usize::MAX,
            ..Default::default()
        };
        let tr = integrate(rotation_field, &[1.0, 0.0], &cfg).unwrap();
        let f = tr.final_state();
        let exact = (10.0f64.cos(), -(10.0f64.sin()));
        let err = ((f[0] - exact.0).powi(2) + (f[1] - exact.1).powi(2)).sqrt();
        // global error within a modest multiple of the local tolerance
        assert!(err < 10.0 * (1e-10 + 1e-8), "error {err:e}");

        let tr2 = integrate(decay_field, &[1.0], &cfg).unwrap();
        assert!((tr2.final_state()[0] - (-10.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn dp54_adapts_step_count() {
        let loose = IntegratorConfig {
            method: Method::Dp54,
            rtol: 1e-3,
            atol: 1e-6,
            t_end: 10.0,
            ..Default::default()
        };
        let tight = IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-12,
            ..loose.clone()
        };
        let n_loose = integrate(rotation_field, &[1.0, 0.0], &loose).unwrap().times.len();
        let n_tight = integrate(rotation_field, &[1.0, 0.0], &tight).unwrap().times.len();
        assert!(n_tight > 2 * n_loose, "{n_loose} vs {n_tight}");
    }

    #[test]
    fn decoupled_network_matches_isolated_node() {
        let node = sprott_circulant(0.55, SprottNonlinearity::Tanh);
        let g = Graph::demo4();
        let cfg_net = CouplingConfig::identity(0.0, 0.0, 3).unwrap();
        let sys = NetworkSystem::new(
            g,
            node.clone(),
            CouplingFunction::Linear(cfg_net),
        )
        .unwrap();
        let icfg = IntegratorConfig {
            t_end: 5.0,
            record_every: usize::MAX,
            ..Default::default()
        };
        let x0_node = [0.3, -0.2, 0.1];
        let stacked: Vec<f64> = (0..4).flat_map(|_| x0_node.to_vec()).collect();
        let tr_net = simulate_network(&sys, &stacked, &icfg).unwrap();
        let tr_one = integrate(
            |_t, x, out| node.eval_into(x, out),
            &x0_node,
            &icfg,
        )
        .unwrap();
        for i in 0..4 {
            for k in 0..3 {
                let a = tr_net.final_state()[3 * i + k];
                let b = tr_one.final_state()[k];
                assert!((a - b).abs() < 1e-13, "node {i} comp {k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn record_every_grid() {
        let cfg = IntegratorConfig {
            t_end: 1.0,
            record_every: 10,
            ..Default::default()
        };
        let tr = integrate(decay_field, &[1.0], &cfg).unwrap();
        assert_eq!(tr.times.len(), 11);
        assert!((tr.times[1] - 0.1).abs() < 1e-12);

        // a final step off the record grid is still recorded
        let cfg2 = IntegratorConfig {
            t_end: 1.05,
            record_every: 10,
            ..Default::default()
        };
        let tr2 = integrate(decay_field, &[1.0], &cfg2).unwrap();
        assert_eq!(tr2.times.len(), 12);
        assert_eq!(*tr2.times.last().unwrap(), 1.05);
    }

    #[test]
    fn divergence_guard_halts() {
        let cfg = IntegratorConfig {
            t_end: 30.0,
            ..Default::default()
        };
        let tr = integrate(|_t, x, out| out[0] = x[0], &[1.0], &cfg).unwrap();
        assert!(tr.diverged);
        assert!(*tr.times.last().unwrap() < 30.0);
        assert!(tr.final_norm() > DEFAULT_DIVERGENCE_THRESHOLD);
    }

    #[test]
    fn finite_time_blowup() {
        // x' = x^2 from 1 blows up at t = 1
        let rk4 = IntegratorConfig {
            t_end: 2.0,
            ..Default::default()
        };
        let tr = integrate(|_t, x, out| out[0] = x[0] * x[0], &[1.0], &rk4).unwrap();
        assert!(tr.diverged);

        let dp = IntegratorConfig {
            method: Method::Dp54,
            t_end: 2.0,
            divergence_threshold: f64::MAX,
            ..Default::default()
        };
        let err = integrate(|_t, x, out| out[0] = x[0] * x[0], &[1.0], &dp).unwrap_err();
        assert!(matches!(err, Error::StepUnderflow { .. }));
    }

    #[test]
    fn trajectory_csv_round_trip() {
        let cfg = IntegratorConfig {
            t_end: 0.5,
            record_every: 5,
            ..Default::default()
        };
        let tr = integrate(rotation_field, &[1.0, 0.0], &cfg).unwrap();
        let csv = tr.to_csv(1).unwrap();
        assert!(csv.starts_with("t,x_1_1,x_2_1\n"));
        assert!(csv.trim_end().ends_with("# diverged=false"));
        let back = Trajectory::parse_csv(&csv).unwrap();
        assert_eq!(back, tr);

        // node-major header for a 2-node, 2-dim layout
        let csv2 = tr.to_csv(2).unwrap();
        assert!(csv2.starts_with("t,x_1_1,x_1_2\n"));
        assert!(tr.to_csv(3).is_err());
    }

    #[test]
    fn csv_parse_errors_carry_line_numbers() {
        let bad_header = "time,x\n0,1\n";
        match Trajectory::parse_csv(bad_header).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        let bad_row = "t,x_1_1\n0,1\n0.5\n";
        match Trajectory::parse_csv(bad_row).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn switching_signal_sampler_respects_dwell() {
        let sig = random_switching_signal(7, 70.0, 1.0, 5, 42).unwrap();
        assert_eq!(sig.switch_times.len(), 7);
        assert_eq!(sig.modes.len(), 8);
        let mut prev = 0.0;
        for &t in &sig.switch_times {
            assert!(t - prev >= 1.0 - 1e-12, "dwell violated at {t}");
            prev = t;
        }
        assert!(70.0 - prev >= 1.0 - 1e-12);
        for w in sig.modes.windows(2) {
            assert_ne!(w[0], w[1], "immediate repeat");
        }
        assert!(sig.modes.iter().all(|&m| m < 5));
        assert_eq!(sig.seed, 42);

        // deterministic in the seed
        let again = random_switching_signal(7, 70.0, 1.0, 5, 42).unwrap();
        assert_eq!(sig, again);
        let other = random_switching_signal(7, 70.0, 1.0, 5, 43).unwrap();
        assert_ne!(sig.switch_times, other.switch_times);
    }

    #[test]
    fn switching_signal_argument_errors() {
        assert!(random_switching_signal(10, 10.0, 1.0, 3, 0).is_err());
        assert!(random_switching_signal(3, 70.0, 1.0, 0, 0).is_err());
        assert!(random_switching_signal(3, 70.0, 1.0, 1, 0).is_err());
        assert!(random_switching_signal(0, 70.0, 1.0, 1, 0).is_ok());
        // exact fit: slack zero is allowed
        assert!(random_switching_signal(6, 7.0, 1.0, 2, 0).is_ok());
    }

    #[test]
    fn switching_signal_json_round_trip() {
        // Bit-exact across many draws: depends on serde_json's
        // float_roundtrip feature, without which parsing can be 1 ulp off.
        for seed in 0..32 {
            let sig = random_switching_signal(5, 20.0, 0.5, 4, seed).unwrap();
            let back = SwitchingSignal::from_json(&sig.to_json()).unwrap();
            assert_eq!(sig, back, "seed {seed}");
        }
        // pinned key order
        let json = random_switching_signal(3, 10.0, 0.5, 4, 7).unwrap().to_json();
        let seed_pos = json.find("\"seed\"").unwrap();
        let times_pos = json.find("\"switch_times\"").unwrap();
        let modes_pos = json.find("\"modes\"").unwrap();
        assert!(seed_pos < times_pos && times_pos < modes_pos);
    }

    #[test]
    fn single_mode_switched_equals_static() {
        let node = sprott_circulant(0.55, SprottNonlinearity::Tanh);
        let coupling =
            CouplingFunction::Linear(CouplingConfig::identity(0.0115, -0.0115, 3).unwrap());
        let sw = SwitchedNetworkSystem::new(vec![Graph::demo4()], node.clone(), coupling.clone())
            .unwrap();
        let sig = SwitchingSignal {
            seed: 0,
            switch_times: vec![],
            modes: vec![0],
        };
        let cfg = IntegratorConfig {
            t_end: 3.0,
            record_every: 25,
            ..Default::default()
        };
        let x0: Vec<f64> = (0..12).map(|i| 0.1 * (i as f64) - 0.55).collect();
        let a = simulate_switched(&sw, &sig, &x0, &cfg).unwrap();
        let stat = NetworkSystem::new(Graph::demo4(), node, coupling).unwrap();
        let b = simulate_network(&stat, &x0, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn switched_run_hits_boundaries_once() {
        let node = linear_node(RealMatrix::new(1, 1, vec![-1.0]).unwrap()).unwrap();
        let coupling =
            CouplingFunction::Linear(CouplingConfig::identity(-0.5, 0.5, 1).unwrap());
        let sw = SwitchedNetworkSystem::new(
            vec![Graph::path(3).unwrap(), Graph::cycle(3).unwrap()],
            node,
            coupling,
        )
        .unwrap();
        let sig = SwitchingSignal {
            seed: 0,
            switch_times: vec![1.234567, 2.5],
            modes: vec![0, 1, 0],
        };
        let cfg = IntegratorConfig {
            t_end: 4.0,
            record_every: 7,
            ..Default::default()
        };
        let tr = simulate_switched(&sw, &sig, &[0.4, -0.1, 0.2], &cfg).unwrap();
        for &bt in &[0.0, 1.234567, 2.5, 4.0] {
            let hits = tr.times.iter().filter(|&&t| t == bt).count();
            assert_eq!(hits, 1, "boundary {bt} recorded {hits} times");
        }
        for w in tr.times.windows(2) {
            assert!(w[1] > w[0], "times not strictly increasing at {w:?}");
        }
        assert!(!tr.diverged);
    }

    #[test]
    fn switched_validation_errors() {
        let node = cubic_scalar();
        let coupling =
            CouplingFunction::Linear(CouplingConfig::identity(-1.0, 1.0, 1).unwrap());
        // disconnected graph rejected at construction
        let disc = Graph::from_edges(4, false, &[(0, 1), (2, 3)]).unwrap();
        assert!(SwitchedNetworkSystem::new(vec![disc], node.clone(), coupling.clone()).is_err());
        assert!(SwitchedNetworkSystem::new(vec![], node.clone(), coupling.clone()).is_err());

        let sw = SwitchedNetworkSystem::new(
            vec![Graph::cycle(4).unwrap()],
            node,
            coupling,
        )
        .unwrap();
        let cfg = IntegratorConfig {
            t_end: 1.0,
            ..Default::default()
        };
        // mode index out of range
        let sig = SwitchingSignal {
            seed: 0,
            switch_times: vec![0.5],
            modes: vec![0, 1],
        };
        assert!(simulate_switched(&sw, &sig, &[0.1; 4], &cfg).is_err());
        // non-increasing switch times
        let sig2 = SwitchingSignal {
            seed: 0,
            switch_times: vec![0.7, 0.4],
            modes: vec![0, 0, 0],
        };
        assert!(simulate_switched(&sw, &sig2, &[0.1; 4], &cfg).is_err());
    }

    #[test]
    fn envelope_recovers_exponential_rate() {
        let cfg = IntegratorConfig {
            t_end: 10.0,
            record_every: 10,
            ..Default::default()
        };
        let trs: Vec<Trajectory> = [1.0, 0.5, 2.0]
            .iter()
            .map(|&x0| integrate(decay_field, &[x0], &cfg).unwrap())
            .collect();
        let refs: Vec<&Trajectory> = trs.iter().collect();
        let env = estimate_decay_envelope(&refs).unwrap();
        assert!((env.rate - 1.0).abs() < 0.05, "rate {}", env.rate);
        assert!(env.amplitude >= 2.0, "amplitude {}", env.amplitude);
        // envelope dominates every sample
        for tr in &trs {
            for (t, n2) in tr.times.iter().zip(tr.norms_l2()) {
                assert!(n2 <= env.amplitude * (-env.rate * t).exp() * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn envelope_on_algebraic_decay_is_flat() {
        let cfg = IntegratorConfig {
            t_end: 100.0,
            record_every: 100,
            ..Default::default()
        };
        let tr = integrate(|_t, x, out| out[0] = -x[0].powi(3), &[1.0], &cfg).unwrap();
        let env = estimate_decay_envelope(&[&tr]).unwrap();
        assert!(env.rate < 0.05, "rate {}", env.rate);
    }

    #[test]
    fn envelope_argument_errors() {
        let one = Trajectory {
            times: vec![0.0],
            states: vec![vec![1.0]],
            diverged: false,
        };
        assert!(estimate_decay_envelope(&[&one]).is_err());
        let flat = Trajectory {
            times: vec![0.0, 0.0],
            states: vec![vec![1.0], vec![1.0]],
            diverged: false,
        };
        assert!(estimate_decay_envelope(&[&flat]).is_err());
        assert!(estimate_decay_envelope(&[]).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = IntegratorConfig::default();
        cfg.dt = 0.0;
        assert!(integrate(decay_field, &[1.0], &cfg).is_err());
        let mut cfg = IntegratorConfig::default();
        cfg.record_every = 0;
        assert!(integrate(decay_field, &[1.0], &cfg).is_err());
        let cfg = IntegratorConfig::default();
        assert!(integrate(decay_field, &[f64::NAN], &cfg).is_err());
        assert!(integrate(decay_field, &[], &cfg).is_err());
    }
}
