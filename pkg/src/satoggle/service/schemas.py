"""Request and response models for the service endpoints.

The service works on paths inside the host filesystem: tensors are far too
large to ship through JSON, so requests name manifest files and output
directories and responses carry summaries plus the paths of what was
written.  The CLI talks to these models in-process by default.
"""

from __future__ import annotations

from pydantic import BaseModel, Field, field_validator

from ..systolic import ACC_BF16, ACC_SINGLE
from ..workload import SYNTH_KINDS


class ArrayOptions(BaseModel):
    rows: int = Field(default=16, ge=1)
    cols: int = Field(default=16, ge=1)
    bic: bool = False
    zvcg: bool = False
    segments: str = "0:7"
    acc_mode: str = ACC_BF16

    @field_validator("acc_mode")
    @classmethod
    def _check_acc_mode(cls, v: str) -> str:
        if v not in (ACC_BF16, ACC_SINGLE):
            raise ValueError(f"acc_mode must be {ACC_BF16!r} or {ACC_SINGLE!r}")
        return v


class SimulateIn(BaseModel):
    manifest: str
    out_dir: str
    array: ArrayOptions = Field(default_factory=ArrayOptions)


class SimulateOut(BaseModel):
    model_name: str
    config: dict
    layers: list[dict]
    totals: dict


class AnalyzeIn(BaseModel):
    manifest: str
    out_dir: str


class AnalyzeOut(BaseModel):
    model_name: str
    layers: list[dict]


class SynthLayerIn(BaseModel):
    name: str
    kind: str
    m: int = Field(ge=1)
    k: int = Field(ge=1)
    n: int = Field(ge=1)
    sigma: float = Field(default=0.05, gt=0)
    zero_fraction: float = Field(default=0.0, ge=0.0, le=1.0)

    @field_validator("kind")
    @classmethod
    def _check_kind(cls, v: str) -> str:
        if v not in SYNTH_KINDS:
            raise ValueError(f"kind must be one of {SYNTH_KINDS}")
        return v


class SynthIn(BaseModel):
    model_name: str
    seed: int
    out_dir: str
    layers: list[SynthLayerIn] = Field(min_length=1)


class SynthOut(BaseModel):
    manifest: str
    layers: list[str]


class CompareIn(BaseModel):
    baseline_dir: str
    proposed_dir: str
    out_dir: str
    formats: list[str] = Field(default_factory=lambda: ["csv", "json"])
    proxy: dict[str, float] | None = None

    @field_validator("formats")
    @classmethod
    def _check_formats(cls, v: list[str]) -> list[str]:
        bad = set(v) - {"csv", "json"}
        if bad or not v:
            raise ValueError("formats must be a non-empty subset of {csv, json}")
        return v


class CompareOut(BaseModel):
    rows: list[dict]
    overall: dict
    reference_points: dict
    proxy_config: dict
    written: list[str]
