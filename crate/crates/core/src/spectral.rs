//! Coupling Laplacians, network spectra, critical coupling strengths and
//! stability verdicts for the origin of a coupled network.
//!
//! For linear coupling with full channel matrix the network Jacobian at the
//! synchronous origin is `I_N (x) Df(0) + L_ab (x) I_d`, so its spectrum is
//! the pairwise sum of the node spectrum and the coupling Laplacian
//! spectrum. That collapse is the workhorse here: verdicts for M = I_d never
//! need an Nd x Nd eigensolve.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::dynamics::{CouplingConfig, NodeSystem};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{kron, RealMatrix};

pub use crate::linalg::eigenvalues;

/// Verdict tolerance on the spectral margin used by the command line tools.
pub const DEFAULT_MARGIN_TOL: f64 = 1e-9;

/// Threshold below which a spectral quantity counts as zero.
const ZERO_TOL: f64 = 1e-10;

/// Signed Laplacian variant: `Minus` is the classical `D - A` (diffusive
/// coupling, beta = -alpha), `Plus` the signless `D + A` (beta = alpha).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LaplacianSign {
    Minus,
    Plus,
}

/// Whether the isolated node spectrum lies strictly left or strictly right
/// of the imaginary axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeRegime {
    StableNode,
    UnstableNode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
}

/// Coupling Laplacian `L_ab = alpha D_in + beta A` in the receiver-major
/// adjacency orientation.
pub fn coupling_laplacian(g: &Graph, alpha: f64, beta: f64) -> RealMatrix {
    let n = g.n();
    let mut l = RealMatrix::zeros(n, n);
    for i in 0..n {
        // The diagonal accumulates alpha once per in-neighbor, in ascending
        // neighbor order, so that summing a row off-diagonal-first cancels
        // exactly (not just approximately) when beta == -alpha.
        let mut diag = 0.0;
        for j in 0..n {
            if g.adjacency_entry(i, j) {
                l[(i, j)] = beta;
                diag += alpha;
            }
        }
        l[(i, i)] = diag;
    }
    l
}

/// Classical (`D - A`) or signless (`D + A`) Laplacian.
pub fn network_laplacian(g: &Graph, sign: LaplacianSign) -> RealMatrix {
    match sign {
        LaplacianSign::Minus => coupling_laplacian(g, 1.0, -1.0),
        LaplacianSign::Plus => coupling_laplacian(g, 1.0, 1.0),
    }
}

/// The multiset `{nu_i + alpha * lambda_j}` over all pairs, sorted by
/// (re, im). With `alpha = 1` and `lambda` the spectrum of `L_ab` this is
/// the exact network Jacobian spectrum for full-channel linear coupling.
pub fn jacobian_spectrum_sum(
    node_eigs: &[Complex64],
    lap_eigs: &[Complex64],
    alpha: f64,
) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(node_eigs.len() * lap_eigs.len());
    for nu in node_eigs {
        for lam in lap_eigs {
            out.push(nu + alpha * lam);
        }
    }
    sort_complex(&mut out);
    out
}

/// Network Jacobian at the synchronous state `1 (x) x0` for linear
/// coupling: `I_N (x) Df(x0) + L_ab (x) M`.
pub fn full_network_jacobian(
    node: &NodeSystem,
    g: &Graph,
    cfg: &CouplingConfig,
    x0: &[f64],
) -> Result<RealMatrix> {
    if cfg.dim() != node.dim() {
        return Err(Error::DimensionMismatch {
            expected: node.dim(),
            got: cfg.dim(),
        });
    }
    if x0.len() != node.dim() {
        return Err(Error::DimensionMismatch {
            expected: node.dim(),
            got: x0.len(),
        });
    }
    let df = node.jacobian(x0);
    let lap = coupling_laplacian(g, cfg.alpha(), cfg.beta());
    let j = kron(&RealMatrix::identity(g.n()), &df).add(&kron(&lap, &cfg.channel_matrix()));
    Ok(j)
}

fn origin_node_spectrum(node: &NodeSystem) -> Result<Vec<Complex64>> {
    let origin = vec![0.0; node.dim()];
    eigenvalues(&node.jacobian(&origin))
}

fn max_re(eigs: &[Complex64]) -> f64 {
    eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

fn min_re(eigs: &[Complex64]) -> f64 {
    eigs.iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
}

/// Critical coupling strength along the ray beta = -alpha (`Minus`) or
/// beta = alpha (`Plus`): the alpha at which the extreme eigenvalue of the
/// network Jacobian crosses the imaginary axis.
///
/// * Stable node (`nu_max < 0`): `alpha_c = -nu_max / lambda_max`, the
///   largest coupling that keeps every mode stable.
/// * Unstable node (`nu_max > 0`): `alpha_c = -nu_max / lambda_min`, the
///   smallest-magnitude negative coupling that stabilizes every mode.
///   Requires zero outside the Laplacian spectrum, otherwise the mode along
///   the kernel eigenvector never feels the coupling and the network is not
///   stabilizable by coupling strength alone.
///
/// For directed graphs the extremes are taken over real parts; the formula
/// is sharp only when those extreme eigenvalues are real.
pub fn critical_coupling(
    node: &NodeSystem,
    g: &Graph,
    sign: LaplacianSign,
    regime: NodeRegime,
) -> Result<f64> {
    let nu = origin_node_spectrum(node)?;
    let nu_max = max_re(&nu);
    if nu_max.abs() < ZERO_TOL {
        return Err(Error::MarginalNode {
            value: nu_max,
            tol: ZERO_TOL,
        });
    }
    let lam = eigenvalues(&network_laplacian(g, sign))?;
    match regime {
        NodeRegime::StableNode => {
            if nu_max > 0.0 {
                return Err(Error::invalid(format!(
                    "stable-node regime requires nu_max < 0, got {nu_max:e}"
                )));
            }
            let lambda_max = max_re(&lam);
            if lambda_max.abs() < ZERO_TOL {
                return Err(Error::invalid(
                    "coupling Laplacian spectrum is zero; graph has no edges",
                ));
            }
            Ok(-nu_max / lambda_max)
        }
        NodeRegime::UnstableNode => {
            if nu_max < 0.0 {
                return Err(Error::invalid(format!(
                    "unstable-node regime requires nu_max > 0, got {nu_max:e}"
                )));
            }
            let min_modulus = lam.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
            let lambda_min = min_re(&lam);
            if min_modulus < ZERO_TOL || lambda_min.abs() < ZERO_TOL {
                return Err(Error::NotStabilizable);
            }
            Ok(-nu_max / lambda_min)
        }
    }
}

/// Spectral stability report for the network origin, serializable to JSON.
#[derive(Clone, Debug)]
pub struct SpectralReport {
    /// Network Jacobian spectrum, sorted by (re, im).
    pub eigenvalues: Vec<Complex64>,
    /// Largest real part over the spectrum.
    pub margin: f64,
    pub verdict: Verdict,
    /// Largest real part of the isolated node spectrum.
    pub nu_max: f64,
    /// Extreme real parts of the signed Laplacian spectrum backing alpha_c.
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Critical coupling for the regime the node is in, when defined.
    pub alpha_c: Option<f64>,
}

impl Serialize for SpectralReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.eigenvalues.iter().map(|z| [z.re, z.im]).collect();
        let mut st = s.serialize_struct("SpectralReport", 7)?;
        st.serialize_field("eigenvalues", &pairs)?;
        st.serialize_field("margin", &self.margin)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.serialize_field("nu_max", &self.nu_max)?;
        st.serialize_field("lambda_min", &self.lambda_min)?;
        st.serialize_field("lambda_max", &self.lambda_max)?;
        st.serialize_field("alpha_c", &self.alpha_c)?;
        st.end()
    }
}

impl SpectralReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Classifies the network origin. The verdict is `Stable` when the margin is
/// below `-tol`, `Unstable` above `tol`, `Marginal` in between. Requires the
/// origin to be a node equilibrium (residual at most 1e-12).
///
/// Full-channel coupling takes the spectrum-sum fast path; channel-masked
/// coupling assembles and solves the full Nd x Nd Jacobian.
pub fn stability_verdict(
    node: &NodeSystem,
    g: &Graph,
    cfg: &CouplingConfig,
    tol: f64,
) -> Result<SpectralReport> {
    if cfg.dim() != node.dim() {
        return Err(Error::DimensionMismatch {
            expected: node.dim(),
            got: cfg.dim(),
        });
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::invalid("verdict tolerance must be finite and nonnegative"));
    }
    let origin = vec![0.0; node.dim()];
    let residual = node
        .eval(&origin)
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if residual > 1e-12 {
        return Err(Error::NotAnEquilibrium(residual));
    }

    let nu = origin_node_spectrum(node)?;
    let nu_max = max_re(&nu);

    let eigs = if cfg.is_identity_channel() {
        let lam = eigenvalues(&coupling_laplacian(g, cfg.alpha(), cfg.beta()))?;
        jacobian_spectrum_sum(&nu, &lam, 1.0)
    } else {
        let mut e = eigenvalues(&full_network_jacobian(node, g, cfg, &origin)?)?;
        sort_complex(&mut e);
        e
    };
    let margin = max_re(&eigs);
    let verdict = if margin < -tol {
        Verdict::Stable
    } else if margin > tol {
        Verdict::Unstable
    } else {
        Verdict::Marginal
    };

    // The alpha_c column only makes sense along one of the signed rays.
    let sign = if cfg.beta() == -cfg.alpha() {
        Some(LaplacianSign::Minus)
    } else if cfg.beta() == cfg.alpha() {
        Some(LaplacianSign::Plus)
    } else {
        None
    };
    let (lambda_min, lambda_max, alpha_c) = match sign {
        Some(s) => {
            let lam = eigenvalues(&network_laplacian(g, s))?;
            let regime = if nu_max < 0.0 {
                NodeRegime::StableNode
            } else {
                NodeRegime::UnstableNode
            };
            let ac = critical_coupling(node, g, s, regime).ok();
            (min_re(&lam), max_re(&lam), ac)
        }
        None => {
            let lam = eigenvalues(&coupling_laplacian(g, cfg.alpha(), cfg.beta()))?;
            (min_re(&lam), max_re(&lam), None)
        }
    };

    Ok(SpectralReport {
        eigenvalues: eigs,
        margin,
        verdict,
        nu_max,
        lambda_min,
        lambda_max,
        alpha_c,
    })
}

/// Necessary-condition screen: if the coupling Laplacian has a spectrum
/// point in the open right half-plane while the node is not strictly
/// stable, the synchronous origin cannot be stable, and this returns false.
/// True means inconclusive.
pub fn necessary_condition_check(
    node: &NodeSystem,
    g: &Graph,
    cfg: &CouplingConfig,
) -> Result<bool> {
    let lam = eigenvalues(&coupling_laplacian(g, cfg.alpha(), cfg.beta()))?;
    let lap_in_rhp = max_re(&lam) > ZERO_TOL;
    let node_not_strictly_stable = max_re(&origin_node_spectrum(node)?) >= 0.0;
    Ok(!(lap_in_rhp && node_not_strictly_stable))
}

pub fn sort_complex(v: &mut [Complex64]) {
    v.sort_unstable_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Multiset comparison of spectra: sort both by (re, im) and compare
/// pairwise; if near-ties in the sort order cross-pair entries, fall back to
/// greedy nearest matching.
pub fn complex_multisets_close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sort_complex(&mut sa);
    sort_complex(&mut sb);
    if sa.iter().zip(&sb).all(|(x, y)| (x - y).norm() <= tol) {
        return true;
    }
    let mut used = vec![false; sb.len()];
    'outer: for x in &sa {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, y) in sb.iter().enumerate() {
            if !used[j] {
                let d = (x - y).norm();
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
        }
        if best_d <= tol {
            used[best] = true;
            continue 'outer;
        }
        return false;
    }
    true
}
