"""Smoke test for the netstab_py extension module.

Locates the built cdylib (release preferred, then debug), stages it in a
temporary directory under the importable name, and exercises the main
surface: graphs, spectra, critical coupling, verdicts, simulation,
switching, conditions, and error mapping.

Build the module first:  cargo build -p netstab-py [--release]
Then run:                python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def stage_module() -> Path:
    candidates = [
        ROOT / "target" / "release" / "libnetstab_py.so",
        ROOT / "target" / "debug" / "libnetstab_py.so",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "libnetstab_py.so not found; run `cargo build -p netstab-py` first"
        )
    stage = Path(tempfile.mkdtemp(prefix="netstab_py_"))
    shutil.copy2(built, stage / "netstab_py.so")
    return stage


sys.path.insert(0, str(stage_module()))

import netstab_py as ns  # noqa: E402


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


# Graph construction and queries.
g = ns.Graph.demo4()
assert g.n == 4 and not g.directed and g.edge_count == 5
assert g.degree_profile() == ([3, 2, 3, 2], [3, 2, 3, 2])
assert g.is_connected() and not g.is_bipartite()
assert ns.Graph.parse(g.serialize()) == g
assert ns.Graph.star(4).is_bipartite()

bal = ns.Graph.balanced(4, 3, 43)
assert bal.directed and bal.is_connected() and bal.is_non_positive_divergence()
assert bal == ns.Graph.balanced(4, 3, 43)

# Node factories.
node = ns.sprott(0.55)
assert node.dim == 3 and node.name == "sprott(tanh)"
nu_max = max(z.real for z in node.origin_spectrum())
assert close(nu_max, 0.5 - 0.55, 1e-12)
assert ns.cubic().eval([0.5]) == [-0.125]

# Critical coupling on both rays.
ac = ns.critical_coupling(node, g, "minus", "stable")
assert close(ac, 0.0125, 1e-9), ac
assert ns.critical_coupling(node, g) == ac  # inferred regime, default ray
ac_plus = ns.critical_coupling(ns.sprott(0.0), g, "plus", "unstable")
assert close(ac_plus, -0.5 / (3.0 - math.sqrt(5.0)), 1e-9), ac_plus

# Verdict flips across the threshold.
below = ns.stability_report(node, g, ac - 1e-3)
above = ns.stability_report(node, g, ac + 1e-3)
assert below["verdict"] == "Stable" and above["verdict"] == "Unstable"
assert close(below["alpha_c"], ac) and len(below["eigenvalues"]) == 12

# Signless Laplacian spectrum: demo4 is non-bipartite so 0 is excluded.
spectrum = ns.laplacian_spectrum(g, "plus")
assert close(min(abs(z) for z in spectrum), 3.0 - math.sqrt(5.0), 1e-9)
assert close(min(abs(z) for z in ns.laplacian_spectrum(ns.Graph.star(4), "plus")), 0.0, 1e-9)

lap = ns.coupling_laplacian(g, 1.0, -1.0)
assert all(close(sum(row), 0.0, 1e-12) for row in lap)

assert [round(z.imag) for z in ns.eigenvalues([[0.0, -1.0], [1.0, 0.0]])] == [-1, 1]

# A short stable run contracts.
x0 = [0.3, -0.2, 0.1, 0.25, -0.15, 0.05, 0.2, -0.1, 0.3, -0.25, 0.15, -0.05]
traj = ns.simulate(g, node, ac - 1e-3, -(ac - 1e-3), x0, t_end=200.0, record_every=100)
assert not traj.diverged and traj.dim == 12
assert traj.final_norm() < 0.5 * max(abs(v) for v in x0)

# Switched run under a seeded signal stays monotone in sum of squares.
modes = [ns.Graph.balanced(4, 3, 42 + k) for k in (1, 2, 3)]
sig = ns.SwitchingSignal.random(4, 20.0, len(modes), tau_min=1.0, seed=7)
assert ns.SwitchingSignal.from_json(sig.to_json()) == sig
sw = ns.simulate_switched(
    modes, ns.cubic(), -1.0, -1.0, [0.4, -0.2, 0.3, -0.4], sig,
    t_end=20.0, record_every=10,
)
audit = ns.decrease_audit(sw)
assert audit["condition"] == "lyapunov_decrease" and audit["passed"]

# Sufficient conditions and their failure notes.
ok = ns.gershgorin_degree(modes, -1.0, 0.5)
assert ok["passed"] and ok["worst_slack"] >= 0.0
cq = ns.common_quadratic(modes, -1.0, 0.5)
assert not cq["passed"] and "directed" in cq["note"]
npd = ns.non_positive_divergence(modes, 1.0)
assert not npd["passed"] and "alpha must be negative" in npd["note"]

p = ns.solve_node_lyapunov([[-2.0]])
assert close(p[0][0], 0.25, 1e-12)

# Error mapping: usage errors raise ValueError, structural ones RuntimeError.
try:
    ns.critical_coupling(node, g, "sideways")
    raise AssertionError("bad sign accepted")
except ValueError:
    pass
try:
    ns.critical_coupling(ns.sprott(0.0), ns.Graph.cycle(4), "plus", "unstable")
    raise AssertionError("even cycle accepted on the signless ray")
except RuntimeError as e:
    assert "not stabilizable" in str(e)

print("smoke test ok")
