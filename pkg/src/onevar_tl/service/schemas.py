"""Request/response models for the HTTP service and the CLI client."""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, Field


class Logic(str, Enum):
    ctl = "ctl"
    ctlstar = "ctlstar"
    atl = "atl"
    atlstar = "atlstar"


class TranslateRequest(BaseModel):
    formula: str
    logic: Logic
    agents: int = Field(default=1, ge=1)


class TranslateResponse(BaseModel):
    logic: str
    agents: int | None
    source: str
    primed: str
    theta: str
    hat: str
    star: str
    sigma: dict[str, str]
    n: int
    guard: int
    out_var: int
    var_map: dict[str, str]
    sizes: dict[str, int]


class ModelCheckRequest(BaseModel):
    model: dict
    formula: str
    logic: Logic
    designated: int | None = None


class ModelCheckResponse(BaseModel):
    satisfying_states: list[int]
    state_names: list[str] | None = None
    designated_holds: bool | None = None


class SatRequest(BaseModel):
    formula: str
    logic: Logic
    max_states: int = Field(default=3, ge=1)
    agents: int = Field(default=1, ge=1)
    max_actions: int = Field(default=2, ge=1)
    jobs: int = Field(default=1, ge=1)
    budget: int | None = None


class Witness(BaseModel):
    model: dict
    state: int


class SatResponse(BaseModel):
    status: str
    witness: Witness | None
    models_examined: int
    bound: dict[str, int]


class GadgetRequest(BaseModel):
    m: int = Field(ge=1)
    flavor: str = "kripke"  # kripke | cgs
    agents: int = Field(default=2, ge=1)
    format: str = "json"  # json | dot


class GadgetResponse(BaseModel):
    model: dict | None = None
    dot: str | None = None


class VerifyRequest(BaseModel):
    suites: list[str] = ["all"]
    seed: int = 42
    cases: int | None = None
    max_m: int = Field(default=5, ge=1)


class SuiteReport(BaseModel):
    name: str
    passed: bool
    cases: int
    elapsed_s: float
    failures: list[str]
    note: str = ""


class VerifyResponse(BaseModel):
    passed: bool
    suites: list[SuiteReport]
