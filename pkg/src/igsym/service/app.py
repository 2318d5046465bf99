"""Stateless HTTP wrapper over the harness operations.

Every endpoint is payload-in/payload-out; the service never touches the
filesystem. File handling (network JSON, dataset CSV, report files) lives in
the CLI client, which talks to this app in-process by default.
"""
from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..attack import DatasetStats
from ..errors import IgsymError
from ..harness import (
    AttackBatchConfig,
    DatasetConfig,
    ExperimentConfig,
    NetworkConfig,
    SweepConfig,
    generate_dataset,
    generate_network,
    invariant_suite_json,
    run_attack_batch,
    run_equivariance_sweep,
    run_invariant_suite,
)
from ..network import from_json_dict, to_json_dict
from . import schemas


def create_app() -> FastAPI:
    app = FastAPI(title="igsym service", version=__version__)

    def fail(exc: Exception) -> HTTPException:
        return HTTPException(status_code=400, detail=str(exc))

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/network/generate", response_model=schemas.GenerateNetworkResponse)
    def network_generate(req: schemas.GenerateNetworkRequest) -> dict:
        try:
            net = generate_network(NetworkConfig.from_json_dict(req.config))
        except IgsymError as exc:
            raise fail(exc) from exc
        return {"network": to_json_dict(net)}

    @app.post("/dataset/generate", response_model=schemas.GenerateDatasetResponse)
    def dataset_generate(req: schemas.GenerateDatasetRequest) -> dict:
        try:
            cfg = DatasetConfig.from_json_dict(req.config)
            rows, stats = generate_dataset(cfg, req.input_dim)
        except IgsymError as exc:
            raise fail(exc) from exc
        return {
            "rows": rows.tolist(),
            "stats": {"minimum": stats.minimum.tolist(), "maximum": stats.maximum.tolist()},
        }

    @app.post("/attack/run", response_model=schemas.AttackRunResponse)
    def attack_run(req: schemas.AttackRunRequest) -> dict:
        try:
            net = from_json_dict(req.network.model_dump())
            cfg = AttackBatchConfig.from_json_dict(req.config)
            stats = DatasetStats(
                minimum=np.asarray(req.stats.minimum, dtype=float),
                maximum=np.asarray(req.stats.maximum, dtype=float),
            )
            report = run_attack_batch(
                net, np.asarray(req.rows, dtype=float), stats, cfg
            )
        except IgsymError as exc:
            raise fail(exc) from exc
        return report.to_json_dict()

    @app.post("/verify/run", response_model=schemas.VerifyRunResponse)
    def verify_run(req: schemas.VerifyRunRequest) -> dict:
        try:
            cfg = ExperimentConfig.from_json_dict(req.config)
            records = run_invariant_suite(cfg)
        except IgsymError as exc:
            raise fail(exc) from exc
        return invariant_suite_json(records, cfg)

    @app.post("/equivariance/run", response_model=schemas.EquivarianceRunResponse)
    def equivariance_run(req: schemas.EquivarianceRunRequest) -> dict:
        try:
            report = run_equivariance_sweep(SweepConfig.from_json_dict(req.config))
        except IgsymError as exc:
            raise fail(exc) from exc
        return report.to_json_dict()

    return app
