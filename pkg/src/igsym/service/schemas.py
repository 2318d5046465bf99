"""Request/response models for the HTTP service.

Config sections travel as plain JSON objects and are validated by the same
parsers the library uses everywhere else, so the CLI and the service cannot
drift apart on config semantics. Numeric payloads are plain floats; JSON
round-trips IEEE doubles exactly, which the determinism guarantees rely on.
"""
from __future__ import annotations

from pydantic import BaseModel, Field


class TailLayerDoc(BaseModel):
    weight: list[list[float]]
    bias: list[float]
    activation: str = "identity"


class NetworkDoc(BaseModel):
    input_dim: int
    head_weight: list[list[float]]
    head_bias: list[float]
    tail: list[TailLayerDoc] = Field(default_factory=list)


class StatsDoc(BaseModel):
    minimum: list[float]
    maximum: list[float]


class GenerateNetworkRequest(BaseModel):
    config: dict = Field(default_factory=dict)


class GenerateNetworkResponse(BaseModel):
    network: NetworkDoc


class GenerateDatasetRequest(BaseModel):
    input_dim: int
    config: dict = Field(default_factory=dict)


class GenerateDatasetResponse(BaseModel):
    rows: list[list[float]]
    stats: StatsDoc


class AttackRunRequest(BaseModel):
    network: NetworkDoc
    rows: list[list[float]]
    stats: StatsDoc
    config: dict = Field(default_factory=dict)


class AttackRunResponse(BaseModel):
    trials: list[dict]
    summary: dict


class VerifyRunRequest(BaseModel):
    config: dict = Field(default_factory=dict)


class VerifyRunResponse(BaseModel):
    all_passed: bool
    invariants: list[dict]
    config: dict


class EquivarianceRunRequest(BaseModel):
    config: dict = Field(default_factory=dict)


class EquivarianceRunResponse(BaseModel):
    steps: list[int]
    monotone_fraction: float
    max_final_residual: float
    rows: list[dict]


class HealthResponse(BaseModel):
    status: str
    version: str
