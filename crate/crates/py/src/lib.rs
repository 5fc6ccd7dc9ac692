//! Python bindings for the network stability toolkit.
//!
//! The module mirrors the core surface: graph construction and queries,
//! node systems, coupling Laplacian spectra, critical coupling, stability
//! verdicts, static and switched simulation, switching signals, and the
//! Lyapunov-based sufficient conditions. Invalid arguments raise
//! `ValueError`; numerical and structural failures raise `RuntimeError`.

use num_complex::Complex64;
use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use netstab_core::dynamics::{
    cubic_scalar, linear_node, sprott_circulant, CouplingConfig, CouplingFunction, NetworkSystem,
    NodeSystem, SprottNonlinearity,
};
use netstab_core::graph::Graph as CoreGraph;
use netstab_core::linalg::{eigenvalues as eig, RealMatrix};
use netstab_core::lyapunov::{
    common_quadratic_condition, gershgorin_condition, lyapunov_decrease_along,
    non_positive_divergence_condition, solve_node_lyapunov as core_solve_node_lyapunov,
    ConditionReport,
};
use netstab_core::sim::{
    random_switching_signal as core_random_signal, simulate_network,
    simulate_switched as core_simulate_switched, IntegratorConfig, Method,
    SwitchedNetworkSystem, SwitchingSignal as CoreSignal, Trajectory as CoreTrajectory,
};
use netstab_core::spectral::{
    coupling_laplacian as core_coupling_laplacian, critical_coupling as core_critical_coupling,
    network_laplacian, stability_verdict, LaplacianSign, NodeRegime, DEFAULT_MARGIN_TOL,
};
use netstab_core::Error;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::Parse { .. } | Error::DimensionMismatch { .. } => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn parse_sign(sign: &str) -> PyResult<LaplacianSign> {
    match sign {
        "minus" => Ok(LaplacianSign::Minus),
        "plus" => Ok(LaplacianSign::Plus),
        other => Err(PyValueError::new_err(format!(
            "sign must be 'minus' or 'plus', got {other:?}"
        ))),
    }
}

fn parse_regime(regime: &str) -> PyResult<NodeRegime> {
    match regime {
        "stable" => Ok(NodeRegime::StableNode),
        "unstable" => Ok(NodeRegime::UnstableNode),
        other => Err(PyValueError::new_err(format!(
            "regime must be 'stable' or 'unstable', got {other:?}"
        ))),
    }
}

fn parse_method(method: &str) -> PyResult<Method> {
    match method {
        "rk4" => Ok(Method::Rk4),
        "dp54" => Ok(Method::Dp54),
        other => Err(PyValueError::new_err(format!(
            "method must be 'rk4' or 'dp54', got {other:?}"
        ))),
    }
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> PyResult<RealMatrix> {
    RealMatrix::from_rows(rows).map_err(to_py_err)
}

fn matrix_to_rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// Finite simple graph, directed or undirected. Edges are `(from, to)`
/// pairs; undirected construction inserts both directions.
#[pyclass(module = "netstab_py", from_py_object)]
#[derive(Clone)]
pub struct Graph {
    inner: CoreGraph,
}

#[pymethods]
impl Graph {
    #[new]
    #[pyo3(signature = (n, directed, edges))]
    fn new(n: usize, directed: bool, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        CoreGraph::from_edges(n, directed, &edges)
            .map(|inner| Graph { inner })
            .map_err(to_py_err)
    }

    #[staticmethod]
    fn path(n: usize) -> PyResult<Self> {
        CoreGraph::path(n).map(|inner| Graph { inner }).map_err(to_py_err)
    }

    #[staticmethod]
    fn star(n: usize) -> PyResult<Self> {
        CoreGraph::star(n).map(|inner| Graph { inner }).map_err(to_py_err)
    }

    #[staticmethod]
    fn cycle(n: usize) -> PyResult<Self> {
        CoreGraph::cycle(n).map(|inner| Graph { inner }).map_err(to_py_err)
    }

    #[staticmethod]
    fn complete(n: usize) -> PyResult<Self> {
        CoreGraph::complete(n).map(|inner| Graph { inner }).map_err(to_py_err)
    }

    /// The 4-node, 5-edge undirected demo graph (4-cycle plus one chord).
    #[staticmethod]
    fn demo4() -> Self {
        Graph {
            inner: CoreGraph::demo4(),
        }
    }

    /// Random balanced digraph: edge-disjoint superposition of a spanning
    /// directed cycle and `cycles - 1` further directed cycles.
    /// Deterministic per seed; strongly connected; in-degree equals
    /// out-degree at every node.
    #[staticmethod]
    fn balanced(n: usize, cycles: usize, seed: u64) -> PyResult<Self> {
        CoreGraph::random_balanced_digraph(n, cycles, seed)
            .map(|inner| Graph { inner })
            .map_err(to_py_err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        CoreGraph::parse(text).map(|inner| Graph { inner }).map_err(to_py_err)
    }

    fn serialize(&self) -> String {
        self.inner.serialize()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn directed(&self) -> bool {
        self.inner.is_directed()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    /// Edge list as `(from, to)` pairs; each undirected edge appears once
    /// with `from < to`.
    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.inner.n();
        let mut out = Vec::with_capacity(self.inner.edge_count());
        for i in 0..n {
            for j in 0..n {
                if self.inner.has_edge(i, j) && (self.inner.is_directed() || i < j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn in_degree(&self, i: usize) -> PyResult<usize> {
        if i >= self.inner.n() {
            return Err(PyIndexError::new_err(format!(
                "node {i} out of range for {} nodes",
                self.inner.n()
            )));
        }
        Ok(self.inner.in_degree(i))
    }

    fn out_degree(&self, i: usize) -> PyResult<usize> {
        if i >= self.inner.n() {
            return Err(PyIndexError::new_err(format!(
                "node {i} out of range for {} nodes",
                self.inner.n()
            )));
        }
        Ok(self.inner.out_degree(i))
    }

    /// `(in_degrees, out_degrees)`; the two lists agree on undirected graphs.
    fn degree_profile(&self) -> (Vec<usize>, Vec<usize>) {
        self.inner.degree_profile()
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn is_bipartite(&self) -> bool {
        self.inner.is_bipartite()
    }

    /// True when out-degree <= in-degree at every node.
    fn is_non_positive_divergence(&self) -> bool {
        self.inner.is_non_positive_divergence()
    }

    fn __eq__(&self, other: &Graph) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, directed={}, edges={})",
            self.inner.n(),
            self.inner.is_directed(),
            self.inner.edge_count()
        )
    }
}

/// Autonomous node vector field with an analytic Jacobian. Built by the
/// module-level factories `sprott`, `cubic` and `linear`.
#[pyclass(module = "netstab_py", from_py_object)]
#[derive(Clone)]
pub struct Node {
    inner: NodeSystem,
}

#[pymethods]
impl Node {
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn params(&self) -> Vec<f64> {
        self.inner.params().to_vec()
    }

    fn eval(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.check_dim(&x)?;
        Ok(self.inner.eval(&x))
    }

    fn jacobian(&self, x: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        self.check_dim(&x)?;
        Ok(matrix_to_rows(&self.inner.jacobian(&x)))
    }

    /// Spectrum of the Jacobian at the origin.
    fn origin_spectrum(&self) -> PyResult<Vec<Complex64>> {
        let origin = vec![0.0; self.inner.dim()];
        eig(&self.inner.jacobian(&origin)).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!("Node({}, dim={})", self.inner.name(), self.inner.dim())
    }
}

impl Node {
    fn check_dim(&self, x: &[f64]) -> PyResult<()> {
        if x.len() != self.inner.dim() {
            return Err(PyValueError::new_err(format!(
                "state has {} entries, node dimension is {}",
                x.len(),
                self.inner.dim()
            )));
        }
        Ok(())
    }
}

/// Recorded solution samples. `states[k]` is the stacked network state at
/// `times[k]`; `diverged` marks a run halted by the divergence guard.
#[pyclass(module = "netstab_py")]
#[derive(Debug)]
pub struct Trajectory {
    inner: CoreTrajectory,
}

#[pymethods]
impl Trajectory {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.times.clone()
    }

    #[getter]
    fn states(&self) -> Vec<Vec<f64>> {
        self.inner.states.clone()
    }

    #[getter]
    fn diverged(&self) -> bool {
        self.inner.diverged
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn final_state(&self) -> Vec<f64> {
        self.inner.final_state().to_vec()
    }

    /// Max-norm of the final sample.
    fn final_norm(&self) -> f64 {
        self.inner.final_norm()
    }

    fn __len__(&self) -> usize {
        self.inner.times.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Trajectory(samples={}, dim={}, diverged={})",
            self.inner.times.len(),
            self.inner.dim(),
            self.inner.diverged
        )
    }
}

/// Piecewise-constant mode schedule: `modes[k]` is active on
/// `[switch_times[k-1], switch_times[k])`; one more mode than switch time.
#[pyclass(module = "netstab_py", name = "SwitchingSignal", from_py_object)]
#[derive(Clone)]
pub struct Signal {
    inner: CoreSignal,
}

#[pymethods]
impl Signal {
    #[new]
    fn new(seed: u64, switch_times: Vec<f64>, modes: Vec<usize>) -> Self {
        Signal {
            inner: CoreSignal {
                seed,
                switch_times,
                modes,
            },
        }
    }

    /// Seeded schedule with `num_switches` switch times on `(0, t_end)`,
    /// every dwell at least `tau_min`, and no immediate mode repeats.
    #[staticmethod]
    #[pyo3(signature = (num_switches, t_end, num_modes, tau_min = 1.0, seed = 0))]
    fn random(
        num_switches: usize,
        t_end: f64,
        num_modes: usize,
        tau_min: f64,
        seed: u64,
    ) -> PyResult<Self> {
        core_random_signal(num_switches, t_end, tau_min, num_modes, seed)
            .map(|inner| Signal { inner })
            .map_err(to_py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CoreSignal::from_json(text).map(|inner| Signal { inner }).map_err(to_py_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Structural checks against a horizon and a mode count.
    fn validate(&self, t_end: f64, num_modes: usize) -> PyResult<()> {
        self.inner.validate(t_end, num_modes).map_err(to_py_err)
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn switch_times(&self) -> Vec<f64> {
        self.inner.switch_times.clone()
    }

    #[getter]
    fn modes(&self) -> Vec<usize> {
        self.inner.modes.clone()
    }

    fn num_switches(&self) -> usize {
        self.inner.num_switches()
    }

    fn __eq__(&self, other: &Signal) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "SwitchingSignal(seed={}, switches={}, modes={:?})",
            self.inner.seed,
            self.inner.num_switches(),
            self.inner.modes
        )
    }
}

/// Circulant 3-channel node `dx_k/dt = -mu x_k - g(x_{k+1 mod 3})` with a
/// unit-slope saturating nonlinearity ("tanh" or "sin").
#[pyfunction]
#[pyo3(signature = (mu, nonlinearity = "tanh"))]
fn sprott(mu: f64, nonlinearity: &str) -> PyResult<Node> {
    let g = match nonlinearity {
        "tanh" => SprottNonlinearity::Tanh,
        "sin" => SprottNonlinearity::Sin,
        other => {
            return Err(PyValueError::new_err(format!(
                "nonlinearity must be 'tanh' or 'sin', got {other:?}"
            )))
        }
    };
    Ok(Node {
        inner: sprott_circulant(mu, g),
    })
}

/// Scalar node dx/dt = -x^3.
#[pyfunction]
fn cubic() -> Node {
    Node {
        inner: cubic_scalar(),
    }
}

/// Linear node dx/dt = A x from a square row-major matrix.
#[pyfunction]
fn linear(rows: Vec<Vec<f64>>) -> PyResult<Node> {
    let a = matrix_from_rows(&rows)?;
    linear_node(a).map(|inner| Node { inner }).map_err(to_py_err)
}

/// Coupling strength at which the extreme network eigenvalue crosses the
/// imaginary axis, along the ray beta = -alpha ("minus") or beta = alpha
/// ("plus"). `regime=None` infers stable/unstable from the node spectrum.
#[pyfunction]
#[pyo3(signature = (node, graph, sign = "minus", regime = None))]
fn critical_coupling(
    node: Node,
    graph: Graph,
    sign: &str,
    regime: Option<&str>,
) -> PyResult<f64> {
    let s = parse_sign(sign)?;
    let r = match regime {
        Some(text) => parse_regime(text)?,
        None => {
            let origin = vec![0.0; node.inner.dim()];
            let nu = eig(&node.inner.jacobian(&origin)).map_err(to_py_err)?;
            let nu_max = nu.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            if nu_max < 0.0 {
                NodeRegime::StableNode
            } else {
                NodeRegime::UnstableNode
            }
        }
    };
    core_critical_coupling(&node.inner, &graph.inner, s, r).map_err(to_py_err)
}

/// Spectral verdict for the network origin under full-channel linear
/// coupling. `beta=None` defaults to the diffusive ray beta = -alpha.
/// Returns a dict with the network spectrum, margin, verdict string, node
/// and Laplacian extremes, and alpha_c when the (alpha, beta) ray defines
/// one.
#[pyfunction]
#[pyo3(signature = (node, graph, alpha, beta = None, tol = DEFAULT_MARGIN_TOL))]
fn stability_report<'py>(
    py: Python<'py>,
    node: Node,
    graph: Graph,
    alpha: f64,
    beta: Option<f64>,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let beta = beta.unwrap_or(-alpha);
    let cfg = CouplingConfig::identity(alpha, beta, node.inner.dim()).map_err(to_py_err)?;
    let report = stability_verdict(&node.inner, &graph.inner, &cfg, tol).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("eigenvalues", report.eigenvalues)?;
    d.set_item("margin", report.margin)?;
    d.set_item("verdict", format!("{:?}", report.verdict))?;
    d.set_item("nu_max", report.nu_max)?;
    d.set_item("lambda_min", report.lambda_min)?;
    d.set_item("lambda_max", report.lambda_max)?;
    d.set_item("alpha_c", report.alpha_c)?;
    Ok(d)
}

/// Coupling Laplacian `alpha D_in + beta A` as row-major nested lists.
#[pyfunction]
fn coupling_laplacian(graph: Graph, alpha: f64, beta: f64) -> Vec<Vec<f64>> {
    matrix_to_rows(&core_coupling_laplacian(&graph.inner, alpha, beta))
}

/// Spectrum of the classical (`D - A`, sign "minus") or signless
/// (`D + A`, sign "plus") Laplacian.
#[pyfunction]
#[pyo3(signature = (graph, sign = "minus"))]
fn laplacian_spectrum(graph: Graph, sign: &str) -> PyResult<Vec<Complex64>> {
    let s = parse_sign(sign)?;
    eig(&network_laplacian(&graph.inner, s)).map_err(to_py_err)
}

/// Eigenvalues of a square row-major matrix, sorted by (re, im).
#[pyfunction]
fn eigenvalues(rows: Vec<Vec<f64>>) -> PyResult<Vec<Complex64>> {
    let m = matrix_from_rows(&rows)?;
    let mut e = eig(&m).map_err(to_py_err)?;
    netstab_core::spectral::sort_complex(&mut e);
    Ok(e)
}

fn integrator_config(
    t_end: f64,
    dt: f64,
    method: &str,
    rtol: f64,
    atol: f64,
    record_every: usize,
    divergence_threshold: f64,
) -> PyResult<IntegratorConfig> {
    Ok(IntegratorConfig {
        method: parse_method(method)?,
        dt,
        rtol,
        atol,
        t_end,
        record_every,
        divergence_threshold,
    })
}

/// Simulates the diffusively coupled network from the stacked state `x0`
/// (length n * node.dim) over `[0, t_end]`.
#[pyfunction]
#[pyo3(signature = (
    graph, node, alpha, beta, x0,
    t_end = 10.0, dt = 0.01, method = "rk4", rtol = 1e-8, atol = 1e-10,
    record_every = 1, divergence_threshold = 1e6,
))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    graph: Graph,
    node: Node,
    alpha: f64,
    beta: f64,
    x0: Vec<f64>,
    t_end: f64,
    dt: f64,
    method: &str,
    rtol: f64,
    atol: f64,
    record_every: usize,
    divergence_threshold: f64,
) -> PyResult<Trajectory> {
    let dim = node.inner.dim();
    let coupling = CouplingConfig::identity(alpha, beta, dim).map_err(to_py_err)?;
    let sys = NetworkSystem::new(graph.inner, node.inner, CouplingFunction::Linear(coupling))
        .map_err(to_py_err)?;
    let cfg = integrator_config(t_end, dt, method, rtol, atol, record_every, divergence_threshold)?;
    simulate_network(&sys, &x0, &cfg)
        .map(|inner| Trajectory { inner })
        .map_err(to_py_err)
}

/// Simulates a switched network: the active topology follows `signal` over
/// the shared node set. Switch times are hit exactly by the step grid.
#[pyfunction]
#[pyo3(signature = (
    graphs, node, alpha, beta, x0, signal,
    t_end = 70.0, dt = 0.01, method = "rk4", rtol = 1e-8, atol = 1e-10,
    record_every = 1, divergence_threshold = 1e6,
))]
#[allow(clippy::too_many_arguments)]
fn simulate_switched(
    graphs: Vec<Graph>,
    node: Node,
    alpha: f64,
    beta: f64,
    x0: Vec<f64>,
    signal: Signal,
    t_end: f64,
    dt: f64,
    method: &str,
    rtol: f64,
    atol: f64,
    record_every: usize,
    divergence_threshold: f64,
) -> PyResult<Trajectory> {
    let dim = node.inner.dim();
    let coupling = CouplingConfig::identity(alpha, beta, dim).map_err(to_py_err)?;
    let modes: Vec<CoreGraph> = graphs.into_iter().map(|g| g.inner).collect();
    let sys = SwitchedNetworkSystem::new(modes, node.inner, CouplingFunction::Linear(coupling))
        .map_err(to_py_err)?;
    let cfg = integrator_config(t_end, dt, method, rtol, atol, record_every, divergence_threshold)?;
    core_simulate_switched(&sys, &signal.inner, &x0, &cfg)
        .map(|inner| Trajectory { inner })
        .map_err(to_py_err)
}

fn condition_to_dict<'py>(py: Python<'py>, rep: &ConditionReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("condition", &rep.condition)?;
    d.set_item("passed", rep.passed)?;
    d.set_item("note", &rep.note)?;
    d.set_item("worst_slack", rep.worst_slack)?;
    d.set_item("failing_nodes", rep.failing_nodes.clone())?;
    let per: Vec<Bound<'py, PyDict>> = rep
        .per_graph
        .iter()
        .map(|gs| {
            let e = PyDict::new(py);
            e.set_item("graph", gs.graph)?;
            e.set_item("slacks", gs.slacks.clone())?;
            e.set_item("worst", gs.worst)?;
            Ok(e)
        })
        .collect::<PyResult<_>>()?;
    d.set_item("per_graph", per)?;
    d.set_item("worst_point", rep.worst_point.clone())?;
    Ok(d)
}

/// Common quadratic Lyapunov certificate over a family of topologies:
/// passes when alpha < 0, |alpha| >= |beta| and every graph is undirected.
#[pyfunction]
fn common_quadratic<'py>(
    py: Python<'py>,
    graphs: Vec<Graph>,
    alpha: f64,
    beta: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let gs: Vec<CoreGraph> = graphs.into_iter().map(|g| g.inner).collect();
    condition_to_dict(py, &common_quadratic_condition(&gs, alpha, beta))
}

/// Degree condition `2|alpha| k_in >= |beta| (k_in + k_out)` at every node
/// of every graph, with alpha < 0.
#[pyfunction]
fn gershgorin_degree<'py>(
    py: Python<'py>,
    graphs: Vec<Graph>,
    alpha: f64,
    beta: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let gs: Vec<CoreGraph> = graphs.into_iter().map(|g| g.inner).collect();
    condition_to_dict(py, &gershgorin_condition(&gs, alpha, beta))
}

/// Non-positive-divergence condition: alpha < 0 and out-degree <= in-degree
/// at every node of every graph.
#[pyfunction]
fn non_positive_divergence<'py>(
    py: Python<'py>,
    graphs: Vec<Graph>,
    alpha: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let gs: Vec<CoreGraph> = graphs.into_iter().map(|g| g.inner).collect();
    condition_to_dict(py, &non_positive_divergence_condition(&gs, alpha))
}

/// Audits sum-of-squares decrease along a completed trajectory: every
/// recorded step must not increase `sum(x_i^2)` beyond tolerance.
#[pyfunction]
fn decrease_audit<'py>(py: Python<'py>, trajectory: &Trajectory) -> PyResult<Bound<'py, PyDict>> {
    let rep = lyapunov_decrease_along(&trajectory.inner, |x: &[f64]| {
        x.iter().map(|v| v * v).sum()
    })
    .map_err(to_py_err)?;
    condition_to_dict(py, &rep)
}

/// Solves `A^T P + P A = -I` for a Hurwitz `A`; returns P as nested lists.
#[pyfunction]
fn solve_node_lyapunov(rows: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let a = matrix_from_rows(&rows)?;
    core_solve_node_lyapunov(&a)
        .map(|lf| matrix_to_rows(lf.matrix()))
        .map_err(to_py_err)
}

#[pymodule]
fn netstab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<Node>()?;
    m.add_class::<Trajectory>()?;
    m.add_class::<Signal>()?;
    m.add_function(wrap_pyfunction!(sprott, m)?)?;
    m.add_function(wrap_pyfunction!(cubic, m)?)?;
    m.add_function(wrap_pyfunction!(linear, m)?)?;
    m.add_function(wrap_pyfunction!(critical_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(stability_report, m)?)?;
    m.add_function(wrap_pyfunction!(coupling_laplacian, m)?)?;
    m.add_function(wrap_pyfunction!(laplacian_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_switched, m)?)?;
    m.add_function(wrap_pyfunction!(common_quadratic, m)?)?;
    m.add_function(wrap_pyfunction!(gershgorin_degree, m)?)?;
    m.add_function(wrap_pyfunction!(non_positive_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(decrease_audit, m)?)?;
    m.add_function(wrap_pyfunction!(solve_node_lyapunov, m)?)?;
    m.add("DEFAULT_MARGIN_TOL", DEFAULT_MARGIN_TOL)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
