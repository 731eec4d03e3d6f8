"""Request and response models for the analysis service."""

from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, Field, model_validator


class GeneratorSpec(BaseModel):
    """A builtin sequence family plus its parameters."""

    family: str
    n: int = Field(ge=1)
    params: dict[str, Union[float, int, str, list[int]]] = Field(default_factory=dict)


class SequencePayload(BaseModel):
    """Either inline logs or a generator descriptor."""

    logs: Optional[list[float]] = None
    generator: Optional[GeneratorSpec] = None
    source: str = "ingested"

    @model_validator(mode="after")
    def _one_of(self):
        if (self.logs is None) == (self.generator is None):
            raise ValueError("provide exactly one of 'logs' or 'generator'")
        return self


class LambdaSpec(BaseModel):
    """Builtin window weight choice or explicit values."""

    kind: Literal["n", "const1", "values"] = "n"
    values: Optional[list[float]] = None
    unbounded: bool = True

    @model_validator(mode="after")
    def _values_present(self):
        if self.kind == "values" and not self.values:
            raise ValueError("kind 'values' requires explicit values")
        return self


class OrliczSpec(BaseModel):
    family: Literal["power", "expm1", "pwl"]
    q: float = 1.0
    knots: Optional[list[list[float]]] = None


class PSpec(BaseModel):
    kind: Literal["const", "values"] = "const"
    value: float = 1.0
    values: Optional[list[float]] = None

    @model_validator(mode="after")
    def _values_present(self):
        if self.kind == "values" and not self.values:
            raise ValueError("kind 'values' requires explicit values")
        return self


class AnalyzeRequest(BaseModel):
    sequence: SequencePayload
    m: int = Field(default=1, ge=0)
    lam: LambdaSpec = Field(default_factory=LambdaSpec)
    spaces: Optional[list[str]] = None
    eps_logs: list[float] = Field(default_factory=lambda: [0.1, 0.5, 1.0])
    tol: float = 1e-2
    tail_fraction: float = 0.2
    tol_rho: float = 1e-6
    orlicz: Optional[OrliczSpec] = None
    p: Optional[PSpec] = None
    descriptor: str = ""


class AnalyzeResponse(BaseModel):
    """The analysis report envelope; sections are deterministic nested dicts."""

    schema_version: int
    input: dict[str, Any]
    parameters: dict[str, Any]
    flags: dict[str, Any]
    norms: dict[str, float]
    spaces: Optional[dict[str, Any]] = None
    density_curves: Optional[list[dict[str, Any]]] = None
    orlicz: Optional[dict[str, Any]] = None
    duals: Optional[dict[str, Any]] = None


class GenerateRequest(BaseModel):
    generator: GeneratorSpec


class GenerateResponse(BaseModel):
    logs: list[float]
    source: str


class SelftestRequest(BaseModel):
    seed: int = 0
    suites: Optional[list[str]] = None


class SuiteResult(BaseModel):
    name: str
    passed: int
    failed: int
    failures: list[str]


class SelftestResponse(BaseModel):
    seed: int
    passed: int
    failed: int
    suites: list[SuiteResult]


class HealthResponse(BaseModel):
    status: str
    version: str
