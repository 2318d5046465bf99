"""Seeded experiment harness: generation, attack batches, and verification suites.

Everything here is a pure function of an explicit config; every stochastic
site carries its own seed, and per-trial seeds are derived from the section
seed through ``numpy.random.SeedSequence``. Two runs with the same config
produce identical results bit for bit, which is what makes the report files
byte-reproducible.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .attack import (
    AttackResult,
    AttackSpec,
    BaselineChoice,
    DatasetStats,
    check_equivariance_orthogonal,
    check_equivariance_translation,
    exponent_scale_bound,
    make_baseline,
    rotation_identity_residual,
    run_attack,
    translation_identity_residual,
)
from .attribution import (
    QuadratureSpec,
    completeness_residual,
    integrated_gradients,
)
from .errors import EmptyAlgebra, InvalidInput
from .linalg import (
    kernel_basis,
    matrix_exp,
    operator_norm_upper,
    row_space_basis,
)
from .network import ACTIVATIONS, MlpNetwork, TailLayer, forward, gradient
from .serialize import render_csv
from .symmetry import (
    SymmetryElement,
    adapted_block_residuals,
    sample_group_element,
    sample_kernel_translation,
    skew_stabilizer_algebra,
    stabilizer_algebra,
    verify_symmetry,
)

BASELINE_NAMES = ("zero", "max_distance", "uniform", "gaussian")
MODE_NAMES = ("rotation", "translation")

ATTACK_CSV_COLUMNS = [
    "input_index",
    "mode",
    "baseline",
    "epsilon",
    "distance",
    "output_residual",
    "argmax_preserved",
    "divergence_l2_relative",
    "divergence_cosine",
    "divergence_topk_jaccard",
    "success",
    "retries_used",
    "error",
]


def _check_keys(doc: dict, allowed: set[str], where: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise InvalidInput(f"unknown {where} config keys: {sorted(unknown)}")


# ---------------------------------------------------------------------------
# Config sections


@dataclass(frozen=True)
class NetworkConfig:
    input_dim: int = 6
    head_dim: int = 4
    rank: int = 2
    tail_sizes: tuple[int, ...] = (5, 3)
    activation: str = "tanh"
    output_activation: str = "identity"
    weight_scale: float = 1.2
    seed: int = 1

    def __post_init__(self) -> None:
        if self.input_dim < 1 or self.head_dim < 1:
            raise InvalidInput("network dims must be positive")
        if not 0 <= self.rank <= min(self.head_dim, self.input_dim):
            raise InvalidInput(
                f"rank must lie in [0, min(head_dim, input_dim)], got {self.rank}"
            )
        sizes = tuple(int(s) for s in self.tail_sizes)
        if any(s < 1 for s in sizes):
            raise InvalidInput("tail sizes must be positive")
        object.__setattr__(self, "tail_sizes", sizes)
        for name in (self.activation, self.output_activation):
            if name not in ACTIVATIONS:
                raise InvalidInput(f"unknown activation {name!r}")
        if not np.isfinite(self.weight_scale) or self.weight_scale <= 0:
            raise InvalidInput("weight_scale must be positive")

    def to_json_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "head_dim": self.head_dim,
            "rank": self.rank,
            "tail_sizes": list(self.tail_sizes),
            "activation": self.activation,
            "output_activation": self.output_activation,
            "weight_scale": self.weight_scale,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "NetworkConfig":
        _check_keys(doc, set(cls().to_json_dict()), "network")
        merged = cls().to_json_dict()
        merged.update(doc)
        merged["tail_sizes"] = tuple(merged["tail_sizes"])
        return cls(**merged)


@dataclass(frozen=True)
class DatasetConfig:
    count: int = 100
    low: float = -1.0
    high: float = 1.0
    seed: int = 2

    def __post_init__(self) -> None:
        if self.count < 1:
            raise InvalidInput("dataset count must be positive")
        if not (np.isfinite(self.low) and np.isfinite(self.high)) or self.low > self.high:
            raise InvalidInput("dataset box must satisfy low <= high")

    def to_json_dict(self) -> dict:
        return {"count": self.count, "low": self.low, "high": self.high, "seed": self.seed}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "DatasetConfig":
        _check_keys(doc, set(cls().to_json_dict()), "dataset")
        merged = cls().to_json_dict()
        merged.update(doc)
        return cls(**merged)


@dataclass(frozen=True)
class AttackBatchConfig:
    modes: tuple[str, ...] = MODE_NAMES
    baselines: tuple[str, ...] = BASELINE_NAMES
    epsilon: float = 0.5
    quad_scheme: str = "gauss_legendre"
    quad_steps: int = 64
    out_index: int = 0
    divergence_threshold: float = 0.1
    output_tol: float = 1e-8
    max_retries: int = 16
    top_k: int = 3
    sigma: float = 0.5
    p: int = 2
    seed: int = 3

    def __post_init__(self) -> None:
        modes = tuple(self.modes)
        baselines = tuple(self.baselines)
        for m in modes:
            if m not in MODE_NAMES:
                raise InvalidInput(f"unknown attack mode {m!r}")
        for b in baselines:
            if b not in BASELINE_NAMES:
                raise InvalidInput(f"unknown baseline {b!r}")
        if not modes or not baselines:
            raise InvalidInput("attack config needs at least one mode and baseline")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "baselines", baselines)
        # Shared validation of the numeric fields.
        self.quad()
        self.spec_for("rotation", "zero", 0, 0)

    def quad(self) -> QuadratureSpec:
        return QuadratureSpec(scheme=self.quad_scheme, steps=self.quad_steps)

    def spec_for(self, mode: str, baseline: str, baseline_seed: int, attack_seed: int) -> AttackSpec:
        return AttackSpec(
            mode=mode,
            epsilon=self.epsilon,
            baseline=BaselineChoice(kind=baseline, p=self.p, sigma=self.sigma, seed=baseline_seed),
            quad=self.quad(),
            out_index=self.out_index,
            divergence_threshold=self.divergence_threshold,
            output_tol=self.output_tol,
            max_retries=self.max_retries,
            top_k=self.top_k,
            seed=attack_seed,
        )

    def to_json_dict(self) -> dict:
        return {
            "modes": list(self.modes),
            "baselines": list(self.baselines),
            "epsilon": self.epsilon,
            "quad_scheme": self.quad_scheme,
            "quad_steps": self.quad_steps,
            "out_index": self.out_index,
            "divergence_threshold": self.divergence_threshold,
            "output_tol": self.output_tol,
            "max_retries": self.max_retries,
            "top_k": self.top_k,
            "sigma": self.sigma,
            "p": self.p,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "AttackBatchConfig":
        _check_keys(doc, set(cls().to_json_dict()), "attack")
        merged = cls().to_json_dict()
        merged.update(doc)
        merged["modes"] = tuple(merged["modes"])
        merged["baselines"] = tuple(merged["baselines"])
        return cls(**merged)


@dataclass(frozen=True)
class VerifyConfig:
    quad_scheme: str = "gauss_legendre"
    quad_steps: int = 256
    corrupt_orthogonal: bool = False
    seed: int = 4

    def quad(self) -> QuadratureSpec:
        return QuadratureSpec(scheme=self.quad_scheme, steps=self.quad_steps)

    def to_json_dict(self) -> dict:
        return {
            "quad_scheme": self.quad_scheme,
            "quad_steps": self.quad_steps,
            "corrupt_orthogonal": self.corrupt_orthogonal,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "VerifyConfig":
        _check_keys(doc, set(cls().to_json_dict()), "verify")
        merged = cls().to_json_dict()
        merged.update(doc)
        return cls(**merged)


@dataclass(frozen=True)
class SweepConfig:
    """Equivariance residual sweep over quadrature resolutions."""

    instances: int = 50
    steps: tuple[int, ...] = (16, 64, 256)
    scheme: str = "gauss_legendre"
    reference_steps: int = 1024
    input_dim: int = 6
    head_dim: int = 4
    rank: int = 2
    seed: int = 5

    def __post_init__(self) -> None:
        steps = tuple(int(s) for s in self.steps)
        if len(steps) < 2 or any(s < 1 for s in steps) or any(
            a >= b for a, b in zip(steps, steps[1:])
        ):
            raise InvalidInput("sweep steps must be a strictly increasing list")
        object.__setattr__(self, "steps", steps)
        if self.instances < 1:
            raise InvalidInput("sweep needs at least one instance")
        if self.reference_steps <= steps[-1]:
            raise InvalidInput("reference_steps must exceed the largest sweep step")
        if not 1 <= self.rank <= min(self.head_dim, self.input_dim):
            raise InvalidInput("sweep rank out of range")

    def to_json_dict(self) -> dict:
        return {
            "instances": self.instances,
            "steps": list(self.steps),
            "scheme": self.scheme,
            "reference_steps": self.reference_steps,
            "input_dim": self.input_dim,
            "head_dim": self.head_dim,
            "rank": self.rank,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SweepConfig":
        _check_keys(doc, set(cls().to_json_dict()), "equivariance")
        merged = cls().to_json_dict()
        merged.update(doc)
        merged["steps"] = tuple(merged["steps"])
        return cls(**merged)


@dataclass(frozen=True)
class PathsConfig:
    network: str = "network.json"
    dataset: str = "dataset.csv"
    attack_csv: str = "attack_report.csv"
    attack_json: str = "attack_report.json"
    verify_json: str = "verify_report.json"
    equivariance_csv: str = "equivariance.csv"
    equivariance_json: str = "equivariance.json"

    def to_json_dict(self) -> dict:
        return {
            "network": self.network,
            "dataset": self.dataset,
            "attack_csv": self.attack_csv,
            "attack_json": self.attack_json,
            "verify_json": self.verify_json,
            "equivariance_csv": self.equivariance_csv,
            "equivariance_json": self.equivariance_json,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "PathsConfig":
        _check_keys(doc, set(cls().to_json_dict()), "paths")
        merged = cls().to_json_dict()
        merged.update(doc)
        return cls(**merged)


@dataclass(frozen=True)
class ExperimentConfig:
    network: NetworkConfig = NetworkConfig()
    dataset: DatasetConfig = DatasetConfig()
    attack: AttackBatchConfig = AttackBatchConfig()
    verify: VerifyConfig = VerifyConfig()
    equivariance: SweepConfig = SweepConfig()
    paths: PathsConfig = PathsConfig()

    def to_json_dict(self) -> dict:
        return {
            "network": self.network.to_json_dict(),
            "dataset": self.dataset.to_json_dict(),
            "attack": self.attack.to_json_dict(),
            "verify": self.verify.to_json_dict(),
            "equivariance": self.equivariance.to_json_dict(),
            "paths": self.paths.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, doc: dict, seed_override: Optional[int] = None) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise InvalidInput("config must be a JSON object")
        _check_keys(
            doc,
            {"seed", "network", "dataset", "attack", "verify", "equivariance", "paths"},
            "top-level",
        )
        sections = {
            "network": NetworkConfig,
            "dataset": DatasetConfig,
            "attack": AttackBatchConfig,
            "verify": VerifyConfig,
            "equivariance": SweepConfig,
        }
        base_seed = doc.get("seed", 0)
        parsed: dict[str, Any] = {}
        for offset, (name, section_cls) in enumerate(sections.items(), start=1):
            raw = dict(doc.get(name, {}))
            if seed_override is not None:
                raw["seed"] = seed_override + offset
            elif "seed" not in raw:
                raw["seed"] = base_seed + offset
            parsed[name] = section_cls.from_json_dict(raw)
        parsed["paths"] = PathsConfig.from_json_dict(dict(doc.get("paths", {})))
        return cls(**parsed)


# ---------------------------------------------------------------------------
# Generation


def generate_network(cfg: NetworkConfig) -> MlpNetwork:
    """Seeded network with head weight of exact rank ``cfg.rank``.

    The head is a product of (head_dim x rank) and (rank x input_dim)
    Gaussian factors; the tail applies ``activation`` on every hidden layer
    and ``output_activation`` on the last.
    """
    rng = np.random.default_rng(cfg.seed)
    n, d, r = cfg.input_dim, cfg.head_dim, cfg.rank
    if r == 0:
        head = np.zeros((d, n))
    else:
        head = (
            rng.standard_normal((d, r))
            @ rng.standard_normal((r, n))
            * (cfg.weight_scale / math.sqrt(r))
        )
    bias = rng.standard_normal(d) * 0.3
    layers = []
    width = d
    for i, size in enumerate(cfg.tail_sizes):
        w = rng.standard_normal((size, width))
        b = rng.standard_normal(size) * 0.3
        act = cfg.activation if i + 1 < len(cfg.tail_sizes) else cfg.output_activation
        layers.append(TailLayer(weight=w, bias=b, activation=act))
        width = size
    return MlpNetwork(head_weight=head, head_bias=bias, tail=tuple(layers))


def generate_dataset(cfg: DatasetConfig, input_dim: int) -> tuple[np.ndarray, DatasetStats]:
    """Uniform samples in the config box plus the box-derived stats."""
    rng = np.random.default_rng(cfg.seed)
    rows = rng.uniform(cfg.low, cfg.high, size=(cfg.count, input_dim))
    return rows, DatasetStats.from_box(cfg.low, cfg.high, input_dim)


def render_dataset_csv(rows: np.ndarray) -> str:
    data = np.asarray(rows, dtype=float)
    header = [str(i) for i in range(data.shape[1])]
    return render_csv(header, [list(row) for row in data])


def parse_dataset_csv(text: str) -> np.ndarray:
    reader = csv.reader(text.splitlines())
    table = [row for row in reader if row]
    if len(table) < 2:
        raise InvalidInput("dataset CSV needs a header and at least one row")
    expected = [str(i) for i in range(len(table[0]))]
    if table[0] != expected:
        raise InvalidInput("dataset CSV header must be the feature indices 0..n-1")
    try:
        data = np.asarray([[float(v) for v in row] for row in table[1:]], dtype=float)
    except ValueError as exc:
        raise InvalidInput(f"dataset CSV has a non-numeric cell: {exc}") from None
    if data.shape[1] != len(expected) or not np.all(np.isfinite(data)):
        raise InvalidInput("dataset CSV is ragged or contains non-finite values")
    return data


# ---------------------------------------------------------------------------
# Attack batches


@dataclass(frozen=True)
class TrialRecord:
    input_index: int
    mode: str
    baseline: str
    epsilon: float
    result: Optional[AttackResult]
    error: str = ""

    def csv_row(self) -> list:
        if self.result is None:
            return [
                self.input_index, self.mode, self.baseline, self.epsilon,
                None, None, None, None, None, None, False, None, self.error,
            ]
        r = self.result
        return [
            self.input_index, self.mode, self.baseline, self.epsilon,
            r.distance, r.output_residual, r.argmax_preserved,
            r.divergence.l2_relative, r.divergence.cosine, r.divergence.topk_jaccard,
            r.success, r.retries_used, self.error,
        ]

    def to_json_dict(self) -> dict:
        doc = {
            "input_index": self.input_index,
            "mode": self.mode,
            "baseline": self.baseline,
            "epsilon": self.epsilon,
            "error": self.error,
        }
        doc["result"] = None if self.result is None else self.result.to_json_dict()
        return doc


@dataclass(frozen=True)
class AttackBatchReport:
    trials: tuple[TrialRecord, ...]
    summary: dict

    def csv_rows(self) -> list[list]:
        return [t.csv_row() for t in self.trials]

    def render_csv(self) -> str:
        return render_csv(ATTACK_CSV_COLUMNS, self.csv_rows())

    def to_json_dict(self) -> dict:
        return {
            "trials": [t.to_json_dict() for t in self.trials],
            "summary": self.summary,
        }


def _summarize(trials: list[TrialRecord], modes, baselines) -> dict:
    summary: dict[str, Any] = {}
    for mode in modes:
        summary[mode] = {}
        for baseline in baselines:
            cell = [t for t in trials if t.mode == mode and t.baseline == baseline]
            ok = [t.result for t in cell if t.result is not None]
            entry: dict[str, Any] = {
                "trials": len(cell),
                "errors": len(cell) - len(ok),
            }
            if ok:
                divs = [r.divergence.l2_relative for r in ok]
                entry["success_rate"] = sum(r.success for r in ok) / len(cell)
                entry["median_divergence"] = float(np.median(divs))
                entry["max_divergence"] = float(np.max(divs))
                entry["max_distance"] = float(np.max([r.distance for r in ok]))
                entry["max_output_residual"] = float(
                    np.max([r.output_residual for r in ok])
                )
                entry["conditions_1_2_rate"] = sum(
                    r.conditions["distance_ok"]
                    and r.conditions["output_ok"]
                    and r.conditions["argmax_preserved"]
                    for r in ok
                ) / len(ok)
            else:
                entry["success_rate"] = 0.0
            summary[mode][baseline] = entry
    return summary


def run_attack_batch(
    net: MlpNetwork,
    inputs: np.ndarray,
    stats: DatasetStats,
    cfg: AttackBatchConfig,
) -> AttackBatchReport:
    """Both attack modes across all configured baselines over the dataset.

    Trials are enumerated input-major, then mode, then baseline; each trial
    gets its own derived seeds for the baseline draw and the attack retries,
    so the batch is reproducible and trials are independent.
    """
    data = np.asarray(inputs, dtype=float)
    if data.ndim != 2 or data.shape[1] != net.input_dim:
        raise InvalidInput("inputs must be (count, input_dim)")
    combos = [(m, b) for m in cfg.modes for b in cfg.baselines]
    total = data.shape[0] * len(combos)
    seeds = np.random.SeedSequence(cfg.seed).generate_state(2 * max(total, 1))
    trials: list[TrialRecord] = []
    t = 0
    for idx in range(data.shape[0]):
        for mode, baseline in combos:
            spec = cfg.spec_for(mode, baseline, int(seeds[2 * t]), int(seeds[2 * t + 1]))
            t += 1
            try:
                result = run_attack(net, data[idx], spec, stats)
                error = ""
            except EmptyAlgebra as exc:
                result, error = None, f"trivial symmetry group: {exc}"
            except InvalidInput as exc:
                result, error = None, f"invalid trial: {exc}"
            trials.append(
                TrialRecord(
                    input_index=idx,
                    mode=mode,
                    baseline=baseline,
                    epsilon=cfg.epsilon,
                    result=result,
                    error=error,
                )
            )
    summary = _summarize(trials, cfg.modes, cfg.baselines)
    return AttackBatchReport(trials=tuple(trials), summary=summary)


# ---------------------------------------------------------------------------
# Invariant suite


@dataclass(frozen=True)
class InvariantRecord:
    name: str
    passed: bool
    residual: float
    tol: float
    detail: str = ""

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "max_residual": self.residual,
            "tol": self.tol,
            "detail": self.detail,
        }


def _central_difference(net: MlpNetwork, x: np.ndarray, out_index: int, h: float = 1e-5):
    grad = np.empty_like(x)
    for i in range(x.shape[0]):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (
            forward(net, x + step)[out_index] - forward(net, x - step)[out_index]
        ) / (2 * h)
    return grad


def _random_smooth_net(rng: np.random.Generator, activation: str = "tanh") -> MlpNetwork:
    n = int(rng.integers(2, 8))
    d = int(rng.integers(2, 8))
    h = int(rng.integers(2, 6))
    m = int(rng.integers(1, 4))
    return MlpNetwork(
        head_weight=rng.standard_normal((d, n)),
        head_bias=rng.standard_normal(d) * 0.3,
        tail=(
            TailLayer(rng.standard_normal((h, d)), rng.standard_normal(h) * 0.3, activation),
            TailLayer(rng.standard_normal((m, h)), rng.standard_normal(m) * 0.3, "identity"),
        ),
    )


def run_invariant_suite(cfg: ExperimentConfig) -> list[InvariantRecord]:
    """Numerical verification of every library-level invariant.

    Residuals are maxima over the sampled instances; each record carries the
    tolerance it was judged against. With ``verify.corrupt_orthogonal`` the
    orthogonal equivariance check receives a deliberately perturbed map and
    must fail (negative control).
    """
    vcfg = cfg.verify
    rng = np.random.default_rng(vcfg.seed)
    quad = vcfg.quad()
    records: list[InvariantRecord] = []

    def record(name, residual, tol, passed=None, detail=""):
        residual = float(residual)
        if passed is None:
            passed = residual <= tol
        records.append(
            InvariantRecord(name=name, passed=bool(passed), residual=residual, tol=tol, detail=detail)
        )

    net = generate_network(cfg.network)
    stats_box = DatasetStats.from_box(cfg.dataset.low, cfg.dataset.high, cfg.network.input_dim)

    # Gradient vs central finite differences on random smooth nets.
    worst = 0.0
    for activation in ("tanh", "sigmoid", "softplus"):
        for _ in range(4):
            probe = _random_smooth_net(rng, activation)
            for _ in range(3):
                x = rng.standard_normal(probe.input_dim)
                out = int(rng.integers(probe.output_dim))
                g = gradient(probe, x, out)
                fd = _central_difference(probe, x, out)
                scale = max(float(np.linalg.norm(fd)), 1e-8)
                worst = max(worst, float(np.linalg.norm(g - fd)) / scale)
    record("gradient_vs_finite_differences", worst, 1e-5)

    # Completeness of integrated gradients at the configured quadrature.
    worst = 0.0
    for _ in range(10):
        x = rng.uniform(cfg.dataset.low, cfg.dataset.high, net.input_dim)
        baseline = rng.uniform(cfg.dataset.low, cfg.dataset.high, net.input_dim)
        att = integrated_gradients(net, x, baseline, cfg.attack.out_index, quad)
        worst = max(worst, completeness_residual(net, att))
    record(
        "ig_completeness",
        worst,
        1e-6,
        detail=f"{quad.scheme} steps={quad.steps}",
    )

    # Matrix exponential: group law and series agreement.
    worst_law, worst_series = 0.0, 0.0
    for _ in range(20):
        size = int(rng.integers(2, 6))
        a = rng.standard_normal((size, size))
        a /= max(1.0, operator_norm_upper(a))
        s, t = rng.uniform(-1.0, 1.0, 2)
        lhs = matrix_exp(s * a) @ matrix_exp(t * a)
        rhs = matrix_exp((s + t) * a)
        worst_law = max(worst_law, float(np.max(np.abs(lhs - rhs))))
        small = 0.1 * a / max(operator_norm_upper(a), 1e-30)
        series = np.eye(size)
        term = np.eye(size)
        for k in range(1, 21):
            term = term @ small / k
            series = series + term
        worst_series = max(
            worst_series, float(np.max(np.abs(matrix_exp(small) - series)))
        )
    record("exp_group_law", worst_law, 1e-8)
    record("exp_vs_series", worst_series, 1e-12)

    # Rank-nullity over random matrices including rank-deficient products.
    defect = 0
    for _ in range(100):
        nn = int(rng.integers(1, 9))
        dd = int(rng.integers(1, 9))
        rr = int(rng.integers(0, min(nn, dd) + 1))
        if rr == 0:
            w = np.zeros((dd, nn))
        else:
            w = rng.standard_normal((dd, rr)) @ rng.standard_normal((rr, nn))
        got = row_space_basis(w).count + kernel_basis(w).count
        defect = max(defect, abs(got - nn))
    record("rank_nullity", defect, 0.0)

    # Algebra dimension laws for the configured head and random heads.
    defect = 0
    for nn in range(1, 7):
        for rr in range(0, nn + 1):
            if rr == 0:
                w = np.zeros((max(rr, 1), nn))
            else:
                w = rng.standard_normal((rr, rr)) @ rng.standard_normal((rr, nn))
            full = stabilizer_algebra(w)
            skew = skew_stabilizer_algebra(w)
            defect = max(defect, abs(full.count - nn * (nn - rr)))
            defect = max(defect, abs(skew.count - (nn - rr) * (nn - rr - 1) // 2))
    record("algebra_dimension_laws", defect, 0.0)

    # Sampled symmetries leave the network output unchanged.
    full = stabilizer_algebra(net.head_weight)
    worst_lin, worst_block = 0.0, 0.0
    if full.is_empty:
        record("symmetry_linear", 0.0, 1e-8, detail="empty algebra (full-rank head)")
        record("group_block_structure", 0.0, 1e-8, detail="empty algebra (full-rank head)")
    else:
        for i in range(10):
            coeffs = rng.standard_normal(full.count)
            x_probe = rng.standard_normal(net.input_dim)
            gen = np.tensordot(coeffs, full.generators, axes=(0, 0))
            scale = exponent_scale_bound(gen.T, x_probe, cfg.attack.epsilon)
            elem = sample_group_element(full, coeffs, scale)
            check = verify_symmetry(elem, net, n_samples=100, tol=1e-8, seed=int(rng.integers(2**31)))
            worst_lin = max(worst_lin, check.max_residual)
            ident, lower = adapted_block_residuals(elem.matrix, net.head_weight)
            worst_block = max(worst_block, ident, lower)
        record("symmetry_linear", worst_lin, 1e-8)
        record("group_block_structure", worst_block, 1e-8)

    kern = kernel_basis(net.head_weight)
    if kern.is_empty:
        record("symmetry_translation", 0.0, 1e-12, detail="trivial kernel")
    else:
        worst_tr = 0.0
        for _ in range(10):
            elem = sample_kernel_translation(
                net.head_weight, int(rng.integers(2**31)), cfg.attack.epsilon
            )
            check = verify_symmetry(elem, net, n_samples=100, tol=1e-12, seed=int(rng.integers(2**31)))
            worst_tr = max(worst_tr, check.max_residual)
        record("symmetry_translation", worst_tr, 1e-12)

    # Orthogonal elements from the skew algebra stay orthogonal.
    skew = skew_stabilizer_algebra(net.head_weight)
    if skew.is_empty:
        record("skew_elements_orthogonal", 0.0, 1e-9, detail="empty skew algebra")
    else:
        worst_orth = 0.0
        for _ in range(10):
            coeffs = rng.standard_normal(skew.count)
            gen = np.tensordot(coeffs, skew.generators, axes=(0, 0))
            scale = rng.uniform(0.0, 10.0) / max(operator_norm_upper(gen), 1e-30)
            g = matrix_exp(scale * gen)
            worst_orth = max(worst_orth, float(np.max(np.abs(g.T @ g - np.eye(net.input_dim)))))
        record("skew_elements_orthogonal", worst_orth, 1e-9)

    # Equivariance of attribution under orthogonal maps and translations.
    ref = QuadratureSpec(scheme="gauss_legendre", steps=max(4 * vcfg.quad_steps, 1024))
    worst_orth_eq, worst_tr_eq, worst_defect = 0.0, 0.0, 0.0
    for _ in range(5):
        probe = _random_smooth_net(rng)
        n = probe.input_dim
        x = rng.standard_normal(n)
        x_prime = rng.standard_normal(n)
        s = rng.standard_normal((n, n))
        s = s - s.T
        g = matrix_exp(0.5 * s / operator_norm_upper(s))
        if vcfg.corrupt_orthogonal:
            g = g + 0.01 * rng.standard_normal((n, n))
        defect = float(np.max(np.abs(g.T @ g - np.eye(n))))
        if defect > 1e-8:
            worst_defect = max(worst_defect, defect)
        else:
            rep = check_equivariance_orthogonal(
                probe, x, x_prime, g, quad, out_index=0, reference_quad=ref
            )
            worst_orth_eq = max(worst_orth_eq, rep.residual)
        u = rng.standard_normal(n)
        rep = check_equivariance_translation(
            probe, x, x_prime, u, quad, out_index=0, reference_quad=ref
        )
        worst_tr_eq = max(worst_tr_eq, rep.residual)
    if worst_defect > 0.0:
        record(
            "equivariance_orthogonal",
            worst_defect,
            1e-8,
            passed=False,
            detail="orthogonality precondition violated (negative control)",
        )
    else:
        record("equivariance_orthogonal", worst_orth_eq, 1e-6)
    record("equivariance_translation", worst_tr_eq, 1e-6)

    # Identity chains: symmetries slide between input and baseline.
    if skew.is_empty:
        record("identity_chain_rotation", 0.0, 1e-6, detail="empty skew algebra")
    else:
        worst_rot_chain = 0.0
        for _ in range(5):
            coeffs = rng.standard_normal(skew.count)
            gen = np.tensordot(coeffs, skew.generators, axes=(0, 0))
            scale = 0.5 / max(operator_norm_upper(gen), 1e-30)
            elem = sample_group_element(skew, coeffs, scale)
            x = rng.uniform(cfg.dataset.low, cfg.dataset.high, net.input_dim)
            x_prime = rng.uniform(cfg.dataset.low, cfg.dataset.high, net.input_dim)
            worst_rot_chain = max(
                worst_rot_chain,
                rotation_identity_residual(net, x, x_prime, elem.matrix, quad),
            )
        record("identity_chain_rotation", worst_rot_chain, 1e-6)
    if kern.is_empty:
        record("identity_chain_translation", 0.0, 1e-6, detail="trivial kernel")
    else:
        worst_tr_chain = 0.0
        for _ in range(5):
            elem = sample_kernel_translation(
                net.head_weight, int(rng.integers(2**31)), cfg.attack.epsilon
            )
            x = rng.uniform(cfg.dataset.low, cfg.dataset.high, net.input_dim)
            x_prime = rng.uniform(cfg.dataset.low, cfg.dataset.high, net.input_dim)
            worst_tr_chain = max(
                worst_tr_chain,
                translation_identity_residual(net, x, x_prime, elem.vector, quad),
            )
        record("identity_chain_translation", worst_tr_chain, 1e-6)

    # Negative control: a generic rotation is not a symmetry of a generic net.
    n = net.input_dim
    s = rng.standard_normal((n, n))
    s = s - s.T
    g = matrix_exp(0.5 * s / operator_norm_upper(s))
    elem = SymmetryElement(kind="linear", matrix=g, provenance={"note": "negative control"})
    check = verify_symmetry(elem, net, n_samples=100, tol=1e-8, seed=int(rng.integers(2**31)))
    record(
        "negative_control_generic_rotation",
        check.max_residual,
        1e-8,
        passed=not check.passed,
        detail="generic rotation must fail the symmetry check",
    )

    # Baselines stay inside the data box.
    worst_box = 0.0
    for kind in ("uniform", "gaussian"):
        for _ in range(5):
            x = rng.uniform(cfg.dataset.low, cfg.dataset.high, net.input_dim)
            choice = BaselineChoice(kind=kind, sigma=cfg.attack.sigma, seed=int(rng.integers(2**31)))
            bl = make_baseline(choice, x, stats_box)
            worst_box = max(
                worst_box,
                float(np.max(np.maximum(stats_box.minimum - bl, bl - stats_box.maximum))),
            )
    record("baselines_inside_box", worst_box, 0.0)

    return records


def invariant_suite_json(records: list[InvariantRecord], cfg: ExperimentConfig) -> dict:
    return {
        "all_passed": all(r.passed for r in records),
        "invariants": [r.to_json_dict() for r in records],
        "config": cfg.to_json_dict(),
    }


# ---------------------------------------------------------------------------
# Equivariance sweep


SWEEP_KINDS = ("orthogonal", "translation")


@dataclass(frozen=True)
class SweepRow:
    instance: int
    kind: str
    residuals: tuple[float, ...]
    monotone: bool

    def to_json_dict(self) -> dict:
        return {
            "instance": self.instance,
            "kind": self.kind,
            "residuals": list(self.residuals),
            "monotone": self.monotone,
        }


@dataclass(frozen=True)
class SweepReport:
    steps: tuple[int, ...]
    rows: tuple[SweepRow, ...]
    monotone_fraction: float
    max_final_residual: float

    def csv_rows(self) -> list[list]:
        return [
            [row.instance, row.kind, *row.residuals, row.monotone] for row in self.rows
        ]

    def render_csv(self) -> str:
        header = ["instance", "kind"] + [f"residual_steps_{n}" for n in self.steps] + ["monotone"]
        return render_csv(header, self.csv_rows())

    def to_json_dict(self) -> dict:
        return {
            "steps": list(self.steps),
            "monotone_fraction": self.monotone_fraction,
            "max_final_residual": self.max_final_residual,
            "rows": [row.to_json_dict() for row in self.rows],
        }


def _probe_network(n: int, d: int, r: int, seed: int) -> MlpNetwork:
    """A small tanh net whose quadrature error is controlled but visible.

    Hidden rows are unit-norm and the output weights are bounded away from
    zero, so the path construction below can dial in how fast the dominant
    hidden unit swings.
    """
    rng = np.random.default_rng(seed)
    head = rng.standard_normal((d, r)) @ rng.standard_normal((r, n)) / math.sqrt(r)
    bias = rng.standard_normal(d) * 0.3
    v1 = rng.standard_normal((3, d))
    v1 /= np.linalg.norm(v1, axis=1, keepdims=True)
    c1 = rng.standard_normal(3) * 0.2
    v2 = rng.choice([-1.0, 1.0], size=(3, 3)) * rng.uniform(0.5, 1.5, size=(3, 3))
    c2 = rng.standard_normal(3) * 0.2
    return MlpNetwork(
        head_weight=head,
        head_bias=bias,
        tail=(TailLayer(v1, c1, "tanh"), TailLayer(v2, c2, "identity")),
    )


def _probe_endpoints(
    net: MlpNetwork, rng: np.random.Generator, swing: tuple[float, float] = (35.0, 60.0)
) -> tuple[np.ndarray, np.ndarray]:
    """Input/baseline pair giving a resolvable, well-centered integrand.

    The direction leans into the head's row space so the integrand actually
    oscillates; the segment length targets a fixed total swing of the
    fastest hidden unit, and the segment is slid so that unit crosses zero
    mid-path. Keeps 16-node quadrature under-resolved while 256 nodes are
    far from the rounding floor, so residual ladders decrease cleanly.
    """
    head, bias = net.head_weight, net.head_bias
    v1, c1 = net.tail[0].weight, net.tail[0].bias
    n = net.input_dim
    for _ in range(16):
        q = rng.standard_normal(head.shape[0])
        direction = head.T @ q
        norm = float(np.linalg.norm(direction))
        if norm < 1e-12:
            continue
        direction = direction / norm + 0.15 * rng.standard_normal(n)
        direction /= np.linalg.norm(direction)
        rates = v1 @ (head @ direction)
        i_star = int(np.argmax(np.abs(rates)))
        if abs(rates[i_star]) > 1e-9:
            break
    else:
        raise InvalidInput("probe construction failed: head annihilates every draw")
    length = rng.uniform(*swing) / abs(rates[i_star])
    x = rng.uniform(-1.5, 1.5, size=n)
    x_prime = x - length * direction
    t0 = rng.uniform(0.35, 0.65)
    arg = v1[i_star] @ (head @ (x_prime + t0 * (x - x_prime)) + bias) + c1[i_star]
    shift = -arg / rates[i_star] * direction
    return x + shift, x_prime + shift


def run_equivariance_sweep(cfg: SweepConfig) -> SweepReport:
    """Quadrature residual ladders for both equivariance identities.

    Each instance draws a fresh probe net, endpoint pair, random orthogonal
    map, and random translation, then reports the residual at every step
    count against a fixed high-resolution reference.
    """
    seeds = np.random.SeedSequence(cfg.seed).generate_state(2 * cfg.instances)
    reference = QuadratureSpec(scheme="gauss_legendre", steps=cfg.reference_steps)
    rows: list[SweepRow] = []
    for i in range(cfg.instances):
        net = _probe_network(cfg.input_dim, cfg.head_dim, cfg.rank, int(seeds[2 * i]))
        rng = np.random.default_rng(int(seeds[2 * i + 1]))
        x, x_prime = _probe_endpoints(net, rng)
        u = rng.standard_normal(cfg.input_dim)
        s = rng.standard_normal((cfg.input_dim, cfg.input_dim))
        s = s - s.T
        g = matrix_exp(0.5 * s / operator_norm_upper(s))
        res_t = tuple(
            check_equivariance_translation(
                net, x, x_prime, u,
                QuadratureSpec(scheme=cfg.scheme, steps=n_steps),
                reference_quad=reference,
            ).residual
            for n_steps in cfg.steps
        )
        res_o = tuple(
            check_equivariance_orthogonal(
                net, x, x_prime, g,
                QuadratureSpec(scheme=cfg.scheme, steps=n_steps),
                reference_quad=reference,
            ).residual
            for n_steps in cfg.steps
        )
        for kind, res in (("translation", res_t), ("orthogonal", res_o)):
            rows.append(
                SweepRow(
                    instance=i,
                    kind=kind,
                    residuals=res,
                    monotone=all(a > b for a, b in zip(res, res[1:])),
                )
            )
    monotone_fraction = sum(r.monotone for r in rows) / len(rows)
    max_final = max(r.residuals[-1] for r in rows)
    return SweepReport(
        steps=cfg.steps,
        rows=tuple(rows),
        monotone_fraction=monotone_fraction,
        max_final_residual=max_final,
    )
