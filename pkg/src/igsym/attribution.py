"""Path attributions and integrated gradients with pluggable quadrature.

The per-direction attribution of a network output along a path is

    integral over t of  <grad F(path(t)), v> * <path'(t), v> dt

and the familiar integrated-gradients vector is the straight-line special
case assembled on the standard basis, where it collapses to the Hadamard
product (x - x') * integral of grad F.

Both routes are implemented independently on purpose: tests pin them against
each other node-for-node.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidInput
from .linalg import _as_vector
from .network import MlpNetwork, forward, gradient

UNIT_NORM_TOL = 1e-10
NORM_GUARD = 1e-12

QUADRATURE_SCHEMES = ("midpoint_riemann", "trapezoid", "gauss_legendre")


@lru_cache(maxsize=64)
def _leggauss(n: int):
    # computing Gauss nodes is an O(n^2) eigen solve; the high-resolution
    # reference rules get requested thousands of times, so cache the raw
    # [-1, 1] nodes (returned arrays are treated as read-only)
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature rule on an interval: scheme name plus step count.

    ``steps`` counts subintervals for midpoint/trapezoid and nodes for
    gauss_legendre. Nodes and weights are generated in a fixed order so the
    accumulated sums are bit-reproducible.
    """

    scheme: str = "gauss_legendre"
    steps: int = 64

    def __post_init__(self):
        if self.scheme not in QUADRATURE_SCHEMES:
            raise InvalidInput(
                f"unknown quadrature scheme {self.scheme!r}; expected one of {QUADRATURE_SCHEMES}"
            )
        if int(self.steps) < 1:
            raise InvalidInput("quadrature steps must be >= 1")
        object.__setattr__(self, "steps", int(self.steps))

    def nodes_weights(self, a: float = 0.0, b: float = 1.0):
        """Nodes and weights for integrating over [a, b]."""
        if not (np.isfinite(a) and np.isfinite(b)) or b <= a:
            raise InvalidInput(f"bad integration interval [{a}, {b}]")
        length = b - a
        n = self.steps
        if self.scheme == "midpoint_riemann":
            t = a + (np.arange(n) + 0.5) * (length / n)
            w = np.full(n, length / n)
        elif self.scheme == "trapezoid":
            t = np.linspace(a, b, n + 1)
            w = np.full(n + 1, length / n)
            w[0] *= 0.5
            w[-1] *= 0.5
        else:
            x, w = _leggauss(n)
            t = a + 0.5 * length * (x + 1.0)
            w = 0.5 * length * w
        return t, w


@dataclass(frozen=True)
class PathSpec:
    """A path for attribution: a straight line or a sampled curve.

    straight_line: parameterized over [0, 1] from ``baseline`` to ``input``.
    sampled: an increasing parameter grid with curve points and derivatives;
    evaluation between samples is piecewise linear.
    """

    kind: str
    input_point: np.ndarray | None = None
    baseline: np.ndarray | None = None
    grid: np.ndarray | None = None
    points: np.ndarray | None = None
    derivatives: np.ndarray | None = None

    @staticmethod
    def straight_line(input_point, baseline) -> "PathSpec":
        x = _as_vector(input_point, "input_point")
        xp = _as_vector(baseline, "baseline")
        if x.shape != xp.shape:
            raise InvalidInput("input and baseline must have matching shape")
        return PathSpec(kind="straight_line", input_point=x, baseline=xp)

    @staticmethod
    def sampled(grid, points, derivatives) -> "PathSpec":
        g = _as_vector(grid, "grid")
        p = np.asarray(points, dtype=float)
        d = np.asarray(derivatives, dtype=float)
        if g.size < 2 or np.any(np.diff(g) <= 0):
            raise InvalidInput("grid must be strictly increasing with >= 2 samples")
        if p.shape != d.shape or p.ndim != 2 or p.shape[0] != g.size:
            raise InvalidInput("points/derivatives must be (len(grid), dim) arrays")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(d))):
            raise InvalidInput("sampled path contains non-finite entries")
        return PathSpec(
            kind="sampled",
            input_point=p[-1],
            baseline=p[0],
            grid=g,
            points=p,
            derivatives=d,
        )

    @property
    def interval(self) -> tuple[float, float]:
        if self.kind == "straight_line":
            return 0.0, 1.0
        return float(self.grid[0]), float(self.grid[-1])

    @property
    def dim(self) -> int:
        return self.input_point.shape[0]

    def evaluate(self, t: np.ndarray):
        """Curve points and derivatives at parameter values t, shape (len(t), dim)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "straight_line":
            delta = self.input_point - self.baseline
            pts = self.baseline[None, :] + t[:, None] * delta[None, :]
            ders = np.broadcast_to(delta, pts.shape).copy()
            return pts, ders
        pts = np.empty((t.size, self.dim))
        ders = np.empty((t.size, self.dim))
        for j in range(self.dim):
            pts[:, j] = np.interp(t, self.grid, self.points[:, j])
            ders[:, j] = np.interp(t, self.grid, self.derivatives[:, j])
        return pts, ders


@dataclass(frozen=True)
class AttributionVector:
    values: np.ndarray
    input_point: np.ndarray
    baseline: np.ndarray
    out_index: int


@dataclass(frozen=True)
class DivergenceReport:
    l2_relative: float
    cosine: float
    topk_jaccard: float
    top_k: int

    def as_dict(self) -> dict:
        return {
            "l2_relative": self.l2_relative,
            "cosine": self.cosine,
            "topk_jaccard": self.topk_jaccard,
            "top_k": self.top_k,
        }


def _check_unit(v: np.ndarray, name: str = "v") -> np.ndarray:
    vec = _as_vector(v, name)
    nrm = float(np.linalg.norm(vec))
    if abs(nrm - 1.0) > UNIT_NORM_TOL:
        raise InvalidInput(f"{name} must be unit-norm within {UNIT_NORM_TOL}, got {nrm!r}")
    return vec


def path_attribution_components(
    net: MlpNetwork,
    out_index: int,
    path: PathSpec,
    directions,
    quad: QuadratureSpec,
) -> np.ndarray:
    """Attribution coefficients along several unit directions at once.

    ``directions`` is (k, n); one batched gradient sweep covers all k.
    """
    dirs = np.asarray(directions, dtype=float)
    if dirs.ndim != 2 or dirs.shape[1] != path.dim:
        raise InvalidInput(f"directions must be (k, {path.dim}), got {dirs.shape}")
    for row in dirs:
        _check_unit(row, "direction")
    if net.input_dim != path.dim:
        raise InvalidInput("network input dim does not match path dim")
    a, b = path.interval
    t, w = quad.nodes_weights(a, b)
    pts, ders = path.evaluate(t)
    grads = gradient(net, pts, out_index)
    comps = np.empty(dirs.shape[0])
    for i, v in enumerate(dirs):
        comps[i] = float(np.dot(w, (grads @ v) * (ders @ v)))
    return comps


def path_attribution_component(
    net: MlpNetwork,
    out_index: int,
    path: PathSpec,
    v,
    quad: QuadratureSpec,
) -> float:
    """Scalar attribution along one unit direction."""
    vec = _check_unit(v)
    return float(
        path_attribution_components(net, out_index, path, vec[None, :], quad)[0]
    )


def path_attribution(
    net: MlpNetwork,
    out_index: int,
    path: PathSpec,
    basis,
    quad: QuadratureSpec,
) -> AttributionVector:
    """Attribution vector assembled from components on a full orthonormal basis.

    ``basis`` rows must be orthonormal and span the whole input space.
    """
    B = np.asarray(basis, dtype=float)
    n = path.dim
    if B.shape != (n, n):
        raise InvalidInput(f"basis must be ({n}, {n}), got {B.shape}")
    gram_defect = float(np.max(np.abs(B @ B.T - np.eye(n))))
    if gram_defect > UNIT_NORM_TOL:
        raise InvalidInput(
            f"basis is not orthonormal (defect {gram_defect:.3e} > {UNIT_NORM_TOL})"
        )
    comps = path_attribution_components(net, out_index, path, B, quad)
    values = comps @ B
    return AttributionVector(
        values=values,
        input_point=path.input_point,
        baseline=path.baseline,
        out_index=out_index,
    )


def integrated_gradients(
    net: MlpNetwork,
    x,
    baseline,
    out_index: int,
    quad: QuadratureSpec,
) -> AttributionVector:
    """Straight-line integrated gradients, (x - x') * integral of grad F.

    Implemented directly (not via path_attribution) so that the two routes
    are independent; they agree node-for-node on the standard basis.
    """
    xv = _as_vector(x, "x")
    bv = _as_vector(baseline, "baseline")
    if xv.shape != bv.shape:
        raise InvalidInput("x and baseline must have matching shape")
    if xv.shape[0] != net.input_dim:
        raise InvalidInput("x does not match network input dim")
    t, w = quad.nodes_weights(0.0, 1.0)
    delta = xv - bv
    pts = bv[None, :] + t[:, None] * delta[None, :]
    grads = gradient(net, pts, out_index)
    integral = w @ grads
    return AttributionVector(
        values=delta * integral, input_point=xv, baseline=bv, out_index=out_index
    )


def completeness_residual(net: MlpNetwork, attribution: AttributionVector) -> float:
    """|sum of attributions - (F(x) - F(x'))|, the completeness defect."""
    fx = forward(net, attribution.input_point)[attribution.out_index]
    fb = forward(net, attribution.baseline)[attribution.out_index]
    return float(abs(np.sum(attribution.values) - (fx - fb)))


def attribution_distance(a, b, top_k: int = 3) -> DivergenceReport:
    """Divergence measures between two attribution vectors.

    l2_relative is ||a-b|| / max(||a||, ||b||, guard); cosine is the standard
    similarity (1.0 when both vectors vanish, 0.0 when exactly one does);
    topk_jaccard is the overlap of the top-k indices ranked by |value|.
    """
    av = a.values if isinstance(a, AttributionVector) else _as_vector(a, "a")
    bv = b.values if isinstance(b, AttributionVector) else _as_vector(b, "b")
    if av.shape != bv.shape:
        raise InvalidInput("attribution vectors must have matching shape")
    if top_k < 1:
        raise InvalidInput("top_k must be >= 1")
    k = min(int(top_k), av.shape[0])
    na = float(np.linalg.norm(av))
    nb = float(np.linalg.norm(bv))
    l2_rel = float(np.linalg.norm(av - bv)) / max(na, nb, NORM_GUARD)
    if na < NORM_GUARD and nb < NORM_GUARD:
        cosine = 1.0
    elif na < NORM_GUARD or nb < NORM_GUARD:
        cosine = 0.0
    else:
        cosine = float(np.dot(av, bv) / (na * nb))
    ia = set(np.argsort(-np.abs(av), kind="stable")[:k].tolist())
    ib = set(np.argsort(-np.abs(bv), kind="stable")[:k].tolist())
    jac = len(ia & ib) / len(ia | ib)
    return DivergenceReport(
        l2_relative=l2_rel, cosine=cosine, topk_jaccard=float(jac), top_k=k
    )
