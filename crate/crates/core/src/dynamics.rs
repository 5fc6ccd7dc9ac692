//! Node dynamics and coupled network vector fields.
//!
//! A network couples N identical d-dimensional nodes along graph edges:
//!
//! ```text
//! dx_i/dt = f(x_i) + sum_j adj[i][j] * phi(x_i, x_j)
//! ```
//!
//! with `phi` the pairwise coupling, receiver first. For linear coupling
//! `phi(u, v) = M (alpha u + beta v)` the whole coupling term collapses to
//! `(alpha D + beta A) (x) M` acting on the stacked state, which is what the
//! spectral module exploits.

use std::fmt;
use std::sync::Arc;

pub use crate::linalg::kron;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::RealMatrix;

type FieldFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
type JacFn = Arc<dyn Fn(&[f64]) -> RealMatrix + Send + Sync>;
type PairFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;
type PairJacFn = Arc<dyn Fn(&[f64], &[f64]) -> RealMatrix + Send + Sync>;

/// Autonomous node vector field with an analytic Jacobian. Cloning shares
/// the underlying closures, so systems are cheap to pass around and safe to
/// use from multiple threads.
#[derive(Clone)]
pub struct NodeSystem {
    dim: usize,
    name: String,
    params: Vec<f64>,
    f: FieldFn,
    jac: JacFn,
}

impl NodeSystem {
    pub fn custom(
        dim: usize,
        name: impl Into<String>,
        params: Vec<f64>,
        f: FieldFn,
        jac: JacFn,
    ) -> Self {
        NodeSystem {
            dim,
            name: name.into(),
            params,
            f,
            jac,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        (self.f)(x, out);
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, &mut out);
        out
    }

    pub fn jacobian(&self, x: &[f64]) -> RealMatrix {
        debug_assert_eq!(x.len(), self.dim);
        (self.jac)(x)
    }
}

impl fmt::Debug for NodeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodeSystem({}, dim {}, params {:?})", self.name, self.dim, self.params)
    }
}

/// Saturating nonlinearity of the circulant node; both have unit slope at
/// the origin, so they share the origin Jacobian.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SprottNonlinearity {
    Tanh,
    Sin,
}

impl SprottNonlinearity {
    fn g(self, x: f64) -> f64 {
        match self {
            SprottNonlinearity::Tanh => x.tanh(),
            SprottNonlinearity::Sin => x.sin(),
        }
    }

    fn dg(self, x: f64) -> f64 {
        match self {
            SprottNonlinearity::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            SprottNonlinearity::Sin => x.cos(),
        }
    }
}

/// Three-channel circulant node
///
/// ```text
/// dx_k/dt = -mu x_k - g(x_{(k+1) mod 3}),   k = 0, 1, 2
/// ```
///
/// with g a unit-slope saturating nonlinearity. The origin Jacobian is
/// `-mu I - P` for the cyclic shift P, so its eigenvalues are
/// `-mu - omega^k` over the cube roots of unity: one real at `-mu - 1` and a
/// conjugate pair with real part `1/2 - mu`. The node is a stable focus for
/// mu > 1/2 and unstable below.
pub fn sprott_circulant(mu: f64, g: SprottNonlinearity) -> NodeSystem {
    let f: FieldFn = Arc::new(move |x, out| {
        for k in 0..3 {
            out[k] = -mu * x[k] - g.g(x[(k + 1) % 3]);
        }
    });
    let jac: JacFn = Arc::new(move |x| {
        let mut m = RealMatrix::zeros(3, 3);
        for k in 0..3 {
            m[(k, k)] = -mu;
            m[(k, (k + 1) % 3)] = -g.dg(x[(k + 1) % 3]);
        }
        m
    });
    let name = match g {
        SprottNonlinearity::Tanh => "sprott(tanh)",
        SprottNonlinearity::Sin => "sprott(sin)",
    };
    NodeSystem::custom(3, name, vec![mu], f, jac)
}

/// Scalar node dx/dt = -x^3: marginally stable origin with algebraic decay
/// x(t) = x0 / sqrt(1 + 2 x0^2 t).
pub fn cubic_scalar() -> NodeSystem {
    let f: FieldFn = Arc::new(|x, out| out[0] = -x[0] * x[0] * x[0]);
    let jac: JacFn = Arc::new(|x| {
        RealMatrix::new(1, 1, vec![-3.0 * x[0] * x[0]]).expect("finite")
    });
    NodeSystem::custom(1, "cubic", vec![], f, jac)
}

/// Linear node dx/dt = A x.
pub fn linear_node(a: RealMatrix) -> Result<NodeSystem> {
    if !a.is_square() {
        return Err(Error::invalid("linear node needs a square matrix"));
    }
    let dim = a.rows();
    let a2 = a.clone();
    let f: FieldFn = Arc::new(move |x, out| {
        for i in 0..dim {
            out[i] = a.row(i).iter().zip(x).map(|(c, v)| c * v).sum();
        }
    });
    let jac: JacFn = Arc::new(move |_| a2.clone());
    Ok(NodeSystem::custom(dim, "linear", vec![], f, jac))
}

/// Linear coupling `phi(u, v) = M (alpha u + beta v)` with M a diagonal 0/1
/// channel selector (at least one channel active).
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingConfig {
    alpha: f64,
    beta: f64,
    channel: Vec<bool>,
}

impl CouplingConfig {
    pub fn new(alpha: f64, beta: f64, channel: Vec<bool>) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::invalid("coupling parameters must be finite"));
        }
        if channel.is_empty() {
            return Err(Error::invalid("channel selector must not be empty"));
        }
        if !channel.iter().any(|&c| c) {
            return Err(Error::invalid("at least one coupling channel must be active"));
        }
        Ok(CouplingConfig {
            alpha,
            beta,
            channel,
        })
    }

    /// Full-channel coupling, M = I_d.
    pub fn identity(alpha: f64, beta: f64, dim: usize) -> Result<Self> {
        Self::new(alpha, beta, vec![true; dim])
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.channel.len()
    }

    pub fn channel(&self) -> &[bool] {
        &self.channel
    }

    pub fn is_identity_channel(&self) -> bool {
        self.channel.iter().all(|&c| c)
    }

    pub fn channel_matrix(&self) -> RealMatrix {
        let d: Vec<f64> = self.channel.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect();
        RealMatrix::from_diagonal(&d)
    }
}

/// Pairwise coupling along an edge, receiver state first.
#[derive(Clone)]
pub enum CouplingFunction {
    Linear(CouplingConfig),
    General {
        dim: usize,
        phi: PairFn,
        /// d phi / d(receiver state)
        d_receiver: PairJacFn,
        /// d phi / d(sender state)
        d_sender: PairJacFn,
    },
}

impl CouplingFunction {
    pub fn dim(&self) -> usize {
        match self {
            CouplingFunction::Linear(cfg) => cfg.dim(),
            CouplingFunction::General { dim, .. } => *dim,
        }
    }

    pub fn eval(&self, receiver: &[f64], sender: &[f64]) -> Vec<f64> {
        match self {
            CouplingFunction::Linear(cfg) => receiver
                .iter()
                .zip(sender)
                .zip(&cfg.channel)
                .map(|((u, v), &on)| {
                    if on {
                        cfg.alpha * u + cfg.beta * v
                    } else {
                        0.0
                    }
                })
                .collect(),
            CouplingFunction::General { phi, .. } => phi(receiver, sender),
        }
    }

    pub fn d_receiver(&self, receiver: &[f64], sender: &[f64]) -> RealMatrix {
        match self {
            CouplingFunction::Linear(cfg) => cfg.channel_matrix().scale(cfg.alpha),
            CouplingFunction::General { d_receiver, .. } => d_receiver(receiver, sender),
        }
    }

    pub fn d_sender(&self, receiver: &[f64], sender: &[f64]) -> RealMatrix {
        match self {
            CouplingFunction::Linear(cfg) => cfg.channel_matrix().scale(cfg.beta),
            CouplingFunction::General { d_sender, .. } => d_sender(receiver, sender),
        }
    }
}

/// A graph of identical nodes with a shared pairwise coupling.
#[derive(Clone)]
pub struct NetworkSystem {
    graph: Graph,
    node: NodeSystem,
    coupling: CouplingFunction,
}

impl NetworkSystem {
    pub fn new(graph: Graph, node: NodeSystem, coupling: CouplingFunction) -> Result<Self> {
        if node.dim() != coupling.dim() {
            return Err(Error::DimensionMismatch {
                expected: node.dim(),
                got: coupling.dim(),
            });
        }
        Ok(NetworkSystem {
            graph,
            node,
            coupling,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn node(&self) -> &NodeSystem {
        &self.node
    }

    pub fn coupling(&self) -> &CouplingFunction {
        &self.coupling
    }

    /// Joint state dimension N * d, node-major layout.
    pub fn dim(&self) -> usize {
        self.graph.n() * self.node.dim()
    }

    /// Writes the full network vector field into `out` without allocating on
    /// the linear-coupling path; this is the integrator hot loop.
    pub fn field_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.graph.n();
        let d = self.node.dim();
        debug_assert_eq!(x.len(), n * d);
        debug_assert_eq!(out.len(), n * d);
        for i in 0..n {
            let xi = &x[i * d..(i + 1) * d];
            self.node.eval_into(xi, &mut out[i * d..(i + 1) * d]);
        }
        match &self.coupling {
            CouplingFunction::Linear(cfg) => {
                let (alpha, beta) = (cfg.alpha, cfg.beta);
                for i in 0..n {
                    for j in 0..n {
                        if !self.graph.adjacency_entry(i, j) {
                            continue;
                        }
                        for (k, &on) in cfg.channel.iter().enumerate() {
                            if on {
                                out[i * d + k] += alpha * x[i * d + k] + beta * x[j * d + k];
                            }
                        }
                    }
                }
            }
            CouplingFunction::General { phi, .. } => {
                for i in 0..n {
                    for j in 0..n {
                        if !self.graph.adjacency_entry(i, j) {
                            continue;
                        }
                        let val = phi(&x[i * d..(i + 1) * d], &x[j * d..(j + 1) * d]);
                        for k in 0..d {
                            out[i * d + k] += val[k];
                        }
                    }
                }
            }
        }
    }
}

impl fmt::Debug for NetworkSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NetworkSystem({:?}, {:?})", self.graph, self.node)
    }
}

/// Full network vector field at the stacked state x (node-major).
pub fn network_vector_field(sys: &NetworkSystem, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; sys.dim()];
    sys.field_into(x, &mut out);
    out
}

/// Jacobian of the network field at an arbitrary stacked state: block (i, i)
/// is `Df(x_i) + sum_j adj[i][j] d_receiver(x_i, x_j)` and block (i, j) is
/// `adj[i][j] d_sender(x_i, x_j)`.
pub fn variational_matrix(sys: &NetworkSystem, xbar: &[f64]) -> RealMatrix {
    let n = sys.graph.n();
    let d = sys.node.dim();
    debug_assert_eq!(xbar.len(), n * d);
    let mut big = RealMatrix::zeros(n * d, n * d);
    for i in 0..n {
        let xi = &xbar[i * d..(i + 1) * d];
        let mut diag = sys.node.jacobian(xi);
        for j in 0..n {
            if !sys.graph.adjacency_entry(i, j) {
                continue;
            }
            let xj = &xbar[j * d..(j + 1) * d];
            diag = diag.add(&sys.coupling.d_receiver(xi, xj));
            let cross = sys.coupling.d_sender(xi, xj);
            for p in 0..d {
                for q in 0..d {
                    big[(i * d + p, j * d + q)] += cross[(p, q)];
                }
            }
        }
        for p in 0..d {
            for q in 0..d {
                big[(i * d + p, i * d + q)] = diag[(p, q)];
            }
        }
    }
    big
}

/// Whether the synchronous state `1 (x) x0` is an equilibrium of the coupled
/// network. Requires linear coupling and a genuine node equilibrium
/// (`||f(x0)|| <= 1e-10`); for alpha = -beta the coupling row sums vanish on
/// synchronous states, so any node equilibrium lifts to the network.
pub fn sync_equilibrium_check(sys: &NetworkSystem, x0: &[f64]) -> Result<bool> {
    const TOL: f64 = 1e-10;
    if !matches!(sys.coupling, CouplingFunction::Linear(_)) {
        return Err(Error::invalid(
            "synchronous equilibrium check requires linear coupling",
        ));
    }
    if x0.len() != sys.node.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.node.dim(),
            got: x0.len(),
        });
    }
    let residual = sys
        .node
        .eval(x0)
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if residual > TOL {
        return Err(Error::NotAnEquilibrium(residual));
    }
    let stacked: Vec<f64> = (0..sys.graph.n()).flat_map(|_| x0.to_vec()).collect();
    let field = network_vector_field(sys, &stacked);
    Ok(field.iter().all(|v| v.abs() <= TOL))
}
