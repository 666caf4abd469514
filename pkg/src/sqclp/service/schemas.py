"""Request and response models for the HTTP service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class CheckRequest(BaseModel):
    program: str


class CheckResponse(BaseModel):
    ok: bool
    qdom: str = ""
    cdom: str = ""
    clauses: int = 0
    predicates: list[str] = Field(default_factory=list)
    diagnostics: list[str] = Field(default_factory=list)


class SolveRequest(BaseModel):
    program: str
    goal: str
    constraints: str = ""
    depth_limit: int = 6
    universe_depth: int = 2
    max_solutions: int = 20


class AnswerModel(BaseModel):
    sigma: dict[str, str]
    mu: dict[str, str]
    store: list[str]
    verified: str  # "true" | "false" | "unknown"


class SolveResponse(BaseModel):
    answers: list[AnswerModel]
    diagnostics: list[str] = Field(default_factory=list)


class ModelRequest(BaseModel):
    program: str
    constraints: str = ""
    universe_depth: int = 2
    max_iters: int = 10
    extra_vars: list[str] = Field(default_factory=list)


class GeneratorModel(BaseModel):
    atom: str
    degree: str
    store: list[str]


class ModelResponse(BaseModel):
    generators: list[GeneratorModel]
    iterations: int
    converged: bool


class QcAtomModel(BaseModel):
    atom: str
    degree: str
    store: list[str] = Field(default_factory=list)


class ProveRequest(BaseModel):
    program: str
    qcatom: QcAtomModel
    depth_limit: int = 6


class ProveResponse(BaseModel):
    found: bool
    proof: Optional[dict] = None
    inferences: int = 0
    sqda_steps: int = 0
    checked: str = ""
    diagnostics: list[str] = Field(default_factory=list)


class SolutionModel(BaseModel):
    sigma: dict[str, str] = Field(default_factory=dict)
    mu: dict[str, str]
    store: list[str] = Field(default_factory=list)


class VerifyRequest(BaseModel):
    program: str
    proof: Optional[dict] = None
    solution: Optional[SolutionModel] = None
    goal: Optional[str] = None
    depth_limit: int = 6


class VerifyResponse(BaseModel):
    verdict: str  # "true" | "false" | "unknown"
    diagnostics: list[str] = Field(default_factory=list)
