"""Symmetry-based adversarial inputs against integrated gradients.

The construction: pick a symmetry of the network head (a rotation fixing the
row space of W, or a translation along ker W), scale it so the input moves by
at most epsilon, and apply it. The network output is preserved exactly (the
pre-activation Wx+b never changes), so the only question is whether the
attribution moved. ``verify_adversarial`` scores the three conditions:

1. distance:        ||x_tilde - x|| <= epsilon
2. output:          ||F(x_tilde) - F(x)|| <= output_tol, argmax unchanged
3. attribution:     relative L2 divergence >= divergence_threshold

This module also carries the equivariance checks used by the verification
suite: attribution components transform contravariantly under orthogonal
maps (comparing coefficient vectors in corresponding direction bases) and
are invariant under simultaneous translation of input, baseline, and
network.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .attribution import (
    DivergenceReport,
    PathSpec,
    QuadratureSpec,
    attribution_distance,
    integrated_gradients,
    path_attribution_component,
    path_attribution_components,
)
from .errors import EmptyAlgebra, InvalidInput
from .linalg import _as_matrix, _as_vector, matrix_exp, operator_norm_upper
from .network import MlpNetwork, act_linear, act_translation, forward
from .symmetry import SymmetryElement, sample_kernel_translation, skew_stabilizer_algebra

# Relative shave applied to sampled perturbation budgets so that the
# recomputed distance never exceeds epsilon by a rounding ulp.
BUDGET_SHAVE = 1e-12

ORTHOGONALITY_TOL = 1e-8

DEFAULT_REFERENCE_QUAD = QuadratureSpec(scheme="gauss_legendre", steps=1024)

BASELINE_KINDS = ("zero", "max_distance", "uniform", "gaussian")


@dataclass(frozen=True)
class BaselineChoice:
    """Reference-point policy for attribution.

    ``p`` selects the norm for the max_distance corner search; on a
    per-coordinate box the farthest point is the same corner for p=1 and
    p=2, so the field is validated but does not change the result.
    """

    kind: str
    p: int = 2
    sigma: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in BASELINE_KINDS:
            raise InvalidInput(f"unknown baseline kind {self.kind!r}")
        if self.p not in (1, 2):
            raise InvalidInput("p must be 1 or 2")
        if self.kind == "gaussian" and not self.sigma > 0:
            raise InvalidInput("sigma must be positive for gaussian baselines")


@dataclass(frozen=True)
class DatasetStats:
    """Componentwise bounding box of the data domain."""

    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self) -> None:
        lo = _as_vector(self.minimum, "minimum")
        hi = _as_vector(self.maximum, "maximum")
        if lo.shape != hi.shape:
            raise InvalidInput("minimum and maximum must share dimension")
        if np.any(lo > hi):
            raise InvalidInput("minimum exceeds maximum on some coordinate")
        object.__setattr__(self, "minimum", lo)
        object.__setattr__(self, "maximum", hi)

    @classmethod
    def from_box(cls, low: float, high: float, dim: int) -> "DatasetStats":
        return cls(minimum=np.full(dim, float(low)), maximum=np.full(dim, float(high)))

    @classmethod
    def from_data(cls, rows: np.ndarray) -> "DatasetStats":
        data = np.asarray(rows, dtype=float)
        if data.ndim != 2 or data.shape[0] == 0:
            raise InvalidInput("rows must be a nonempty 2-d array")
        return cls(minimum=data.min(axis=0), maximum=data.max(axis=0))


@dataclass(frozen=True)
class AttackSpec:
    mode: str  # "rotation" or "translation"
    epsilon: float
    baseline: BaselineChoice
    quad: QuadratureSpec
    out_index: int = 0
    divergence_threshold: float = 0.1
    output_tol: float = 1e-8
    max_retries: int = 16
    top_k: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in ("rotation", "translation"):
            raise InvalidInput(f"unknown attack mode {self.mode!r}")
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise InvalidInput("epsilon must be nonnegative")
        if self.max_retries < 1:
            raise InvalidInput("max_retries must be >= 1")
        if self.divergence_threshold < 0:
            raise InvalidInput("divergence_threshold must be nonnegative")


@dataclass(frozen=True)
class AttackResult:
    x_tilde: np.ndarray
    element: Optional[SymmetryElement]
    distance: float
    output_residual: float
    argmax_preserved: bool
    divergence: DivergenceReport
    success: bool
    retries_used: int
    conditions: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        elem = None
        if self.element is not None:
            elem = {
                "kind": self.element.kind,
                "matrix": None if self.element.matrix is None else self.element.matrix.tolist(),
                "vector": None if self.element.vector is None else self.element.vector.tolist(),
                "provenance": self.element.provenance,
            }
        return {
            "x_tilde": self.x_tilde.tolist(),
            "element": elem,
            "distance": self.distance,
            "output_residual": self.output_residual,
            "argmax_preserved": self.argmax_preserved,
            "divergence": self.divergence.as_dict(),
            "success": self.success,
            "retries_used": self.retries_used,
            "conditions": dict(self.conditions),
        }


@dataclass(frozen=True)
class EquivarianceReport:
    """Residuals from one equivariance check."""

    residual: float
    component_residual: Optional[float]
    defect: float  # orthogonality defect of g; 0.0 for translation checks


def exponent_scale_bound(generator, x, epsilon: float) -> float:
    """Largest safe |k| so that ||exp(k*A)x - x|| <= epsilon.

    Uses the conservative bound log(epsilon/||x|| + 1) / ||A||_F; the
    Frobenius norm dominates the spectral norm, so the guarantee holds with
    margin for generic generators.
    """
    A = _as_matrix(generator, "generator")
    if A.shape[0] != A.shape[1]:
        raise InvalidInput("generator must be square")
    v = _as_vector(x, "x")
    if not np.isfinite(epsilon) or epsilon < 0:
        raise InvalidInput("epsilon must be nonnegative")
    norm_a = operator_norm_upper(A)
    norm_x = float(np.linalg.norm(v))
    if norm_a == 0.0:
        raise InvalidInput("zero generator: scale bound undefined")
    if norm_x == 0.0:
        raise InvalidInput("zero input: scale bound undefined")
    return math.log(epsilon / norm_x + 1.0) / norm_a


def make_baseline(choice: BaselineChoice, x, stats: Optional[DatasetStats]) -> np.ndarray:
    """Materialize a baseline vector for input ``x``."""
    xv = _as_vector(x, "x")
    if choice.kind == "zero":
        return np.zeros_like(xv)
    if stats is None:
        raise InvalidInput(f"baseline kind {choice.kind!r} requires dataset stats")
    if stats.minimum.shape != xv.shape:
        raise InvalidInput("stats dimension does not match x")
    if choice.kind == "max_distance":
        # The farthest point of a box is a corner; each coordinate picks the
        # farther bound independently (ties go to the lower bound).
        return np.where(
            np.abs(stats.minimum - xv) >= np.abs(stats.maximum - xv),
            stats.minimum,
            stats.maximum,
        )
    rng = np.random.default_rng(choice.seed)
    if choice.kind == "uniform":
        return rng.uniform(stats.minimum, stats.maximum)
    noisy = xv + choice.sigma * rng.standard_normal(xv.shape[0])
    return np.clip(noisy, stats.minimum, stats.maximum)


def verify_adversarial(
    net: MlpNetwork,
    x,
    x_tilde,
    baseline,
    spec: AttackSpec,
) -> AttackResult:
    """Score conditions 1-3 for a candidate input; records, never raises."""
    xv = _as_vector(x, "x")
    xt = _as_vector(x_tilde, "x_tilde")
    bv = _as_vector(baseline, "baseline")
    distance = float(np.linalg.norm(xt - xv))
    out_x = forward(net, xv)
    out_xt = forward(net, xt)
    output_residual = float(np.linalg.norm(out_xt - out_x))
    argmax_preserved = bool(np.argmax(out_x) == np.argmax(out_xt))
    ig_x = integrated_gradients(net, xv, bv, spec.out_index, spec.quad)
    ig_xt = integrated_gradients(net, xt, bv, spec.out_index, spec.quad)
    divergence = attribution_distance(ig_x, ig_xt, top_k=spec.top_k)
    conditions = {
        "distance_ok": distance <= spec.epsilon,
        "output_ok": output_residual <= spec.output_tol,
        "argmax_preserved": argmax_preserved,
        "divergence_ok": divergence.l2_relative >= spec.divergence_threshold,
    }
    success = all(conditions.values())
    return AttackResult(
        x_tilde=xt,
        element=None,
        distance=distance,
        output_residual=output_residual,
        argmax_preserved=argmax_preserved,
        divergence=divergence,
        success=success,
        retries_used=0,
        conditions=conditions,
    )


def _attempt_seeds(seed: int, count: int) -> np.ndarray:
    return np.random.SeedSequence(seed).generate_state(count)


def _with_element(result: AttackResult, element: SymmetryElement, retries: int) -> AttackResult:
    return AttackResult(
        x_tilde=result.x_tilde,
        element=element,
        distance=result.distance,
        output_residual=result.output_residual,
        argmax_preserved=result.argmax_preserved,
        divergence=result.divergence,
        success=result.success,
        retries_used=retries,
        conditions=result.conditions,
    )


def attack_rotation(
    net: MlpNetwork,
    x,
    spec: AttackSpec,
    stats: Optional[DatasetStats],
) -> AttackResult:
    """Rotate the input inside the symmetry group, keeping ||x_tilde - x|| <= epsilon.

    Resamples generator coefficients up to ``spec.max_retries`` times and
    returns the attempt with the largest attribution divergence (stopping
    early on success). The baseline is drawn once and held fixed across
    retries.
    """
    xv = _as_vector(x, "x")
    if float(np.linalg.norm(xv)) == 0.0:
        raise InvalidInput("rotation attack undefined at x = 0")
    basis = skew_stabilizer_algebra(net.head_weight)
    if basis.is_empty:
        raise EmptyAlgebra(
            "no rotational symmetry: row-space complement has dimension below two"
        )
    baseline = make_baseline(spec.baseline, xv, stats)
    seeds = _attempt_seeds(spec.seed, spec.max_retries)
    best: Optional[AttackResult] = None
    for attempt in range(spec.max_retries):
        rng = np.random.default_rng(seeds[attempt])
        coeffs = rng.standard_normal(basis.count)
        gen = np.tensordot(coeffs, basis.generators, axes=(0, 0))
        if operator_norm_upper(gen) == 0.0:
            continue
        if spec.epsilon == 0.0:
            scale = 0.0
        else:
            scale = exponent_scale_bound(gen.T, xv, spec.epsilon) * (1.0 - BUDGET_SHAVE)
        g = matrix_exp(scale * gen)
        element = SymmetryElement(
            kind="linear",
            matrix=g,
            provenance={
                "algebra": basis.kind,
                "coefficients": coeffs.tolist(),
                "scale": float(scale),
            },
        )
        x_tilde = element.transform_input(xv)
        result = _with_element(
            verify_adversarial(net, xv, x_tilde, baseline, spec), element, attempt
        )
        assert result.distance <= spec.epsilon, "perturbation exceeded budget"
        if best is None or result.divergence.l2_relative > best.divergence.l2_relative:
            best = result
        if result.success:
            break
    if best is None:
        raise EmptyAlgebra("all sampled generators degenerate")
    return best


def attack_translation(
    net: MlpNetwork,
    x,
    spec: AttackSpec,
    stats: Optional[DatasetStats],
) -> AttackResult:
    """Shift the input along the kernel of the head weight by epsilon."""
    xv = _as_vector(x, "x")
    baseline = make_baseline(spec.baseline, xv, stats)
    seeds = _attempt_seeds(spec.seed, spec.max_retries)
    shaved = spec.epsilon * (1.0 - BUDGET_SHAVE)
    best: Optional[AttackResult] = None
    for attempt in range(spec.max_retries):
        element = sample_kernel_translation(net.head_weight, int(seeds[attempt]), shaved)
        x_tilde = element.transform_input(xv)
        result = _with_element(
            verify_adversarial(net, xv, x_tilde, baseline, spec), element, attempt
        )
        assert result.distance <= spec.epsilon, "perturbation exceeded budget"
        if best is None or result.divergence.l2_relative > best.divergence.l2_relative:
            best = result
        if result.success:
            break
    assert best is not None
    return best


def run_attack(
    net: MlpNetwork,
    x,
    spec: AttackSpec,
    stats: Optional[DatasetStats],
) -> AttackResult:
    if spec.mode == "rotation":
        return attack_rotation(net, x, spec, stats)
    return attack_translation(net, x, spec, stats)


def _orthogonality_defect(g: np.ndarray) -> float:
    return float(np.max(np.abs(g.T @ g - np.eye(g.shape[0]))))


def check_equivariance_orthogonal(
    net: MlpNetwork,
    x,
    x_prime,
    g,
    quad: QuadratureSpec,
    out_index: int = 0,
    v=None,
    reference_quad: QuadratureSpec = DEFAULT_REFERENCE_QUAD,
) -> EquivarianceReport:
    """Attribution components in the rotated frame match the originals.

    Compares the coefficient vector of the transformed problem against the
    direction basis {e_j} with the coefficient vector of the original
    problem against {g^T e_j}. The transformed side uses ``quad``; the
    original side uses the high-resolution ``reference_quad``, so the
    returned residual tracks the probe quadrature's truncation error.
    """
    gm = _as_matrix(g, "g")
    xv = _as_vector(x, "x")
    bv = _as_vector(x_prime, "x_prime")
    n = xv.shape[0]
    if gm.shape != (n, n):
        raise InvalidInput(f"g must be {n}x{n}")
    defect = _orthogonality_defect(gm)
    if defect > ORTHOGONALITY_TOL:
        raise InvalidInput(f"g is not orthogonal (defect {defect:.3e})")
    moved_net = act_linear(gm, net)
    moved_path = PathSpec.straight_line(gm @ xv, gm @ bv)
    base_path = PathSpec.straight_line(xv, bv)
    probe = path_attribution_components(moved_net, out_index, moved_path, np.eye(n), quad)
    # Rows of g are exactly the mapped directions g^T e_j.
    reference = path_attribution_components(net, out_index, base_path, gm, reference_quad)
    residual = float(np.linalg.norm(probe - reference))
    component_residual = None
    if v is not None:
        vv = _as_vector(v, "v")
        a = path_attribution_component(moved_net, out_index, moved_path, vv, quad)
        b = path_attribution_component(net, out_index, base_path, gm.T @ vv, reference_quad)
        component_residual = abs(a - b)
    return EquivarianceReport(
        residual=residual, component_residual=component_residual, defect=defect
    )


def check_equivariance_translation(
    net: MlpNetwork,
    x,
    x_prime,
    u,
    quad: QuadratureSpec,
    out_index: int = 0,
    reference_quad: QuadratureSpec = DEFAULT_REFERENCE_QUAD,
) -> EquivarianceReport:
    """Shifting input, baseline, and network together leaves attribution fixed."""
    xv = _as_vector(x, "x")
    bv = _as_vector(x_prime, "x_prime")
    uv = _as_vector(u, "u")
    moved = integrated_gradients(
        act_translation(uv, net), xv + uv, bv + uv, out_index, quad
    )
    reference = integrated_gradients(net, xv, bv, out_index, reference_quad)
    residual = float(np.linalg.norm(moved.values - reference.values))
    return EquivarianceReport(residual=residual, component_residual=None, defect=0.0)


def rotation_identity_residual(
    net: MlpNetwork,
    x,
    x_prime,
    g,
    quad: QuadratureSpec,
    out_index: int = 0,
) -> float:
    """Moving a head symmetry between input and baseline preserves components.

    For g orthogonal with W g = W, the component of the attribution of
    (g^T x, x') along e_j equals the component of (x, g x') along g e_j;
    both sides share quadrature nodes, so the residual is rounding-level.
    Returns the max componentwise gap.
    """
    gm = _as_matrix(g, "g")
    xv = _as_vector(x, "x")
    bv = _as_vector(x_prime, "x_prime")
    n = xv.shape[0]
    defect = _orthogonality_defect(gm)
    if defect > ORTHOGONALITY_TOL:
        raise InvalidInput(f"g is not orthogonal (defect {defect:.3e})")
    lhs = path_attribution_components(
        net, out_index, PathSpec.straight_line(gm.T @ xv, bv), np.eye(n), quad
    )
    # Columns of g are the mapped directions g e_j.
    rhs = path_attribution_components(
        net, out_index, PathSpec.straight_line(xv, gm @ bv), gm.T, quad
    )
    return float(np.max(np.abs(lhs - rhs)))


def translation_identity_residual(
    net: MlpNetwork,
    x,
    x_prime,
    u,
    quad: QuadratureSpec,
    out_index: int = 0,
) -> float:
    """Kernel shifts move freely between input and baseline; max componentwise gap."""
    xv = _as_vector(x, "x")
    bv = _as_vector(x_prime, "x_prime")
    uv = _as_vector(u, "u")
    lhs = integrated_gradients(net, xv - uv, bv, out_index, quad)
    rhs = integrated_gradients(net, xv, bv + uv, out_index, quad)
    return float(np.max(np.abs(lhs.values - rhs.values)))
