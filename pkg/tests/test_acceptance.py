"""End-to-end acceptance gates, one verdict line per gate.

Run ``pytest -s tests/test_acceptance.py`` to see the verdict lines; a
plain pytest run reports the same outcomes through the usual pass/fail
mechanism. Gate 6 encodes the requirement that a zero baseline makes the
rotation attack invisible; on generic low-rank heads the measured
divergence is far from zero, so that gate fails by design rather than
being weakened. See the README section on the failing gate for the
analysis. The whole module runs in well under two minutes on one core.
"""
import json

import numpy as np
import pytest

from igsym.attack import (
    exponent_scale_bound,
    rotation_identity_residual,
    translation_identity_residual,
)
from igsym.attribution import (
    QuadratureSpec,
    completeness_residual,
    integrated_gradients,
)
from igsym.cli import main as cli_main
from igsym.errors import EmptyAlgebra
from igsym.harness import (
    AttackBatchConfig,
    DatasetConfig,
    NetworkConfig,
    SweepConfig,
    generate_dataset,
    generate_network,
    run_attack_batch,
    run_equivariance_sweep,
)
from igsym.linalg import matrix_exp
from igsym.network import gradient
from igsym.symmetry import (
    sample_group_element,
    sample_kernel_translation,
    skew_stabilizer_algebra,
    stabilizer_algebra,
    verify_symmetry,
)
from tests.test_linalg import random_low_rank
from tests.test_network import central_difference

QUAD256 = QuadratureSpec("gauss_legendre", 256)


def _verdict(gate: int, name: str, ok: bool, detail: str) -> str:
    line = f"[gate {gate}] {'PASS' if ok else 'FAIL'} {name}: {detail}"
    print(line)
    return line


# ------------------------------------------------- gate 1: output invariance


def test_gate_01_symmetry_leaves_outputs_fixed():
    """20 random low-rank nets, 10 linear and 10 translation elements each,
    output residual over 100 samples per element."""
    worst_lin = worst_tr = 0.0
    for i in range(20):
        net = generate_network(NetworkConfig(seed=100 + i, rank=1 + i % 3))
        basis = stabilizer_algebra(net.head_weight)
        rng = np.random.default_rng(1000 + i)
        for j in range(10):
            elem = sample_group_element(
                basis, rng.standard_normal(basis.count), 1.0 / basis.count
            )
            chk = verify_symmetry(elem, net, n_samples=100, tol=1e-8, seed=2000 + 10 * i + j)
            worst_lin = max(worst_lin, chk.max_residual)
            assert chk.passed
            shift = sample_kernel_translation(net.head_weight, 3000 + 10 * i + j, 0.5)
            chk = verify_symmetry(shift, net, n_samples=100, tol=1e-12, seed=4000 + 10 * i + j)
            worst_tr = max(worst_tr, chk.max_residual)
            assert chk.passed
    ok = worst_lin <= 1e-8 and worst_tr <= 1e-12
    line = _verdict(
        1, "symmetry leaves outputs fixed", ok,
        f"worst linear {worst_lin:.2e} (tol 1e-08), "
        f"worst translation {worst_tr:.2e} (tol 1e-12)",
    )
    assert ok, line


# ------------------------------------------------- gate 2: generator counts


def test_gate_02_generator_counts_exact():
    """Exact dimension laws for every n <= 8 and every rank, including the
    empty algebra at full rank."""
    rng = np.random.default_rng(202)
    checked = 0
    for n in range(1, 9):
        for r in range(0, n + 1):
            w = random_low_rank(rng, max(r, 1), n, r)
            full = stabilizer_algebra(w)
            skew = skew_stabilizer_algebra(w)
            assert full.count == n * (n - r)
            assert skew.count == (n - r) * (n - r - 1) // 2
            checked += 1
            if r == n:
                with pytest.raises(EmptyAlgebra):
                    sample_group_element(full, np.zeros(0), 1.0)
                with pytest.raises(EmptyAlgebra):
                    sample_kernel_translation(w, seed=0, epsilon=0.5)
    line = _verdict(
        2, "generator counts exact", True,
        f"{checked} (n, rank) pairs, full n*(n-r) and skew (n-r)(n-r-1)/2",
    )
    assert checked == 44, line


# ---------------------------------------------- gate 3: perturbation budget


def test_gate_03_perturbation_budget_never_exceeded():
    """The exponent bound keeps exp(k*A)x within epsilon of x on 1000 random
    triples, and every attack result stays inside its budget."""
    rng = np.random.default_rng(303)
    violations = 0
    worst_margin = -np.inf
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        a = rng.standard_normal((n, n))
        x = rng.standard_normal(n)
        eps = 10.0 ** rng.uniform(-3.0, 1.0)
        k = exponent_scale_bound(a, x, eps)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        margin = float(np.linalg.norm(matrix_exp(sign * k * a) @ x - x)) - eps
        worst_margin = max(worst_margin, margin)
        if margin > 0:
            violations += 1

    cfg = AttackBatchConfig(seed=333)
    net = generate_network(NetworkConfig(seed=331))
    rows, stats = generate_dataset(DatasetConfig(seed=332, count=10), 6)
    report = run_attack_batch(net, rows, stats, cfg)
    results = [t.result for t in report.trials if t.result is not None]
    over_budget = sum(1 for r in results if r.distance > cfg.epsilon)

    ok = violations == 0 and over_budget == 0
    line = _verdict(
        3, "perturbation budget never exceeded", ok,
        f"0/1000 bound violations (worst margin {worst_margin:.2e}), "
        f"{over_budget}/{len(results)} attack results over budget",
    )
    assert ok, line


# ------------------------------------------- gate 4: equivariance residuals


def test_gate_04_equivariance_residual_ladder():
    """50 random instances per identity: residual at 256 nodes below 1e-6 and
    monotone decay across 16/64/256 nodes in at least 95% of rows."""
    report = run_equivariance_sweep(SweepConfig(instances=50, seed=405))
    ok = report.max_final_residual <= 1e-6 and report.monotone_fraction >= 0.95
    line = _verdict(
        4, "equivariance residual ladder", ok,
        f"max residual at 256 nodes {report.max_final_residual:.2e} (tol 1e-06), "
        f"monotone fraction {report.monotone_fraction:.3f} (need 0.95)",
    )
    assert ok, line


# ------------------------------------------------- gate 5: identity chains


def test_gate_05_baseline_input_identity_chains():
    """Moving a symmetry between input and baseline changes nothing: rotation
    chains in component form, translation chains as raw vectors."""
    worst_rot = worst_sh = 0.0
    for i in range(50):
        net = generate_network(NetworkConfig(seed=500 + i))
        rng = np.random.default_rng(5500 + i)
        x = rng.uniform(-1.0, 1.0, 6)
        x_prime = rng.uniform(-1.0, 1.0, 6)
        skew = skew_stabilizer_algebra(net.head_weight)
        g = sample_group_element(skew, rng.standard_normal(skew.count), 0.7).matrix
        worst_rot = max(worst_rot, rotation_identity_residual(net, x, x_prime, g, QUAD256))
        u = sample_kernel_translation(net.head_weight, 5800 + i, 0.5).vector
        worst_sh = max(worst_sh, translation_identity_residual(net, x, x_prime, u, QUAD256))
    ok = worst_rot <= 1e-6 and worst_sh <= 1e-6
    line = _verdict(
        5, "baseline/input identity chains", ok,
        f"worst rotation chain {worst_rot:.2e}, worst translation chain "
        f"{worst_sh:.2e} (tol 1e-06, 50 instances each)",
    )
    assert ok, line


# -------------------------------------- gate 6: zero baseline vs rotation


def test_gate_06_zero_baseline_hides_rotation():
    """Requires the rotation attack to be invisible at a zero baseline
    (divergence <= 1e-6, success rate exactly 0) while the max-distance
    baseline exposes it (median divergence >= 0.1 over 100 trials).

    Left failing on purpose: with a zero baseline both endpoints of the
    attribution path rotate through the same pre-activations, yet the
    attribution difference (moved_x - x) * path_gradient does not vanish,
    and measured divergence is large. The README documents the numbers.
    """
    net = generate_network(NetworkConfig(seed=601))
    rows, stats = generate_dataset(DatasetConfig(seed=602, count=100), 6)
    report = run_attack_batch(net, rows, stats, AttackBatchConfig(
        modes=("rotation",),
        baselines=("zero", "max_distance"),
        seed=603,
    ))
    by_base = {}
    for base in ("zero", "max_distance"):
        rows_b = [t.result for t in report.trials if t.baseline == base and t.result]
        divs = np.array([r.divergence.l2_relative for r in rows_b])
        succ = float(np.mean([r.success for r in rows_b]))
        by_base[base] = (divs, succ)

    zero_divs, zero_succ = by_base["zero"]
    md_divs, _ = by_base["max_distance"]
    md_median = float(np.median(md_divs))
    ok = float(zero_divs.max()) <= 1e-6 and zero_succ == 0.0 and md_median >= 0.1
    line = _verdict(
        6, "zero baseline hides rotation", ok,
        f"zero baseline: success rate {zero_succ:.2f} (need 0.00), "
        f"max divergence {zero_divs.max():.3f} (tol 1e-06), "
        f"median {np.median(zero_divs):.3f}; "
        f"max-distance median divergence {md_median:.3f} (need >= 0.1); "
        f"100 trials per baseline",
    )
    assert ok, line


# ------------------------------------- gate 7: translation universality


def test_gate_07_translation_attack_universality():
    """Kernel translations beat every baseline family: budget and output
    conditions at 100%, full divergence success in at least 90% of trials."""
    net = generate_network(NetworkConfig(seed=701))
    rows, stats = generate_dataset(DatasetConfig(seed=702, count=100), 6)
    report = run_attack_batch(net, rows, stats, AttackBatchConfig(
        modes=("translation",),
        seed=703,
    ))
    cells = report.summary["translation"]
    ok = True
    rates = []
    for base in ("zero", "max_distance", "uniform", "gaussian"):
        cell = cells[base]
        rates.append(f"{base} {cell['success_rate']:.3f}")
        ok = ok and cell["conditions_1_2_rate"] == 1.0
        ok = ok and cell["success_rate"] >= 0.9
        ok = ok and cell["errors"] == 0
    line = _verdict(
        7, "translation attack universality", ok,
        "success rates " + ", ".join(rates) + " (need >= 0.9, budget and "
        "output conditions at 1.0); 100 trials per baseline",
    )
    assert ok, line


# ---------------------------------------- gate 8: numerical foundations


def test_gate_08_numerical_foundations():
    """Gradients against central differences, attribution completeness, and
    the matrix exponential against its truncated Taylor series."""
    acts = ("tanh", "sigmoid", "softplus")
    worst_grad = 0.0
    worst_comp = 0.0
    rng = np.random.default_rng(808)
    for i in range(50):
        net = generate_network(NetworkConfig(seed=800 + i, activation=acts[i % 3]))
        x = rng.standard_normal(6)
        out_index = i % net.output_dim
        g = gradient(net, x, out_index)
        fd = central_difference(net, x, out_index)
        rel = np.linalg.norm(g - fd) / max(np.linalg.norm(fd), 1e-12)
        worst_grad = max(worst_grad, float(rel))
        ig = integrated_gradients(
            net, rng.uniform(-1, 1, 6), rng.uniform(-1, 1, 6), out_index, QUAD256
        )
        worst_comp = max(worst_comp, completeness_residual(net, ig))

    worst_series = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 9))
        a = rng.standard_normal((n, n))
        a *= rng.uniform(0.2, 1.0) * 0.1 / np.linalg.norm(a)
        series = np.eye(n)
        term = np.eye(n)
        for k in range(1, 21):
            term = term @ a / k
            series = series + term
        worst_series = max(worst_series, float(np.max(np.abs(matrix_exp(a) - series))))

    ok = worst_grad <= 1e-5 and worst_comp <= 1e-6 and worst_series <= 1e-12
    line = _verdict(
        8, "numerical foundations", ok,
        f"gradient vs central differences {worst_grad:.2e} (tol 1e-05), "
        f"completeness {worst_comp:.2e} (tol 1e-06), "
        f"exp vs 20-term series {worst_series:.2e} (tol 1e-12)",
    )
    assert ok, line


# ------------------------------------------- gate 9: deterministic reports


def test_gate_09_byte_identical_reports(tmp_path):
    """The same config run twice through the CLI yields byte-identical
    network, dataset, and attack reports."""
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "dataset": {"count": 8},
        "attack": {"baselines": ["zero", "max_distance"], "max_retries": 8},
    }))
    for sub in ("a", "b"):
        out = tmp_path / sub
        for cmd in ("gen-net", "gen-data", "attack"):
            assert cli_main([cmd, "--config", str(config), "--out", str(out)]) == 0
    names = ("network.json", "dataset.csv", "attack_report.csv", "attack_report.json")
    same = all(
        (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()
        for n in names
    )
    line = _verdict(
        9, "byte-identical reports", same,
        "two CLI runs compared over " + ", ".join(names),
    )
    assert same, line
