"""HTTP service exposing program checking, goal solving, model
construction, proof search and proof/solution verification."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..constraints import FALSE, TRUE, Tristate
from ..engine import GoalSolution, SolveOptions, is_solution, solve
from ..program import (
    ParseError,
    Program,
    format_term,
    parse_constraints,
    parse_goal,
    parse_program,
    parse_term,
)
from ..proximity import ProximityError
from ..qualdom import QualError
from ..semantics import (
    check_proof,
    derive,
    interp_to_json,
    make_universe,
    proof_from_json,
    proof_stats,
    proof_to_json,
    qcatom_from_json,
    tp_lfp,
)
from .schemas import (
    AnswerModel,
    CheckRequest,
    CheckResponse,
    GeneratorModel,
    ModelRequest,
    ModelResponse,
    ProveRequest,
    ProveResponse,
    SolveRequest,
    SolveResponse,
    VerifyRequest,
    VerifyResponse,
)

_INPUT_ERRORS = (ParseError, ProximityError, QualError, KeyError, ValueError)


def _tri_name(t: Tristate) -> str:
    return {TRUE: "true", FALSE: "false"}.get(t, "unknown")


def _load_program(text: str) -> Program:
    try:
        return parse_program(text)
    except _INPUT_ERRORS as exc:
        raise HTTPException(status_code=400, detail=str(exc))


def create_app() -> FastAPI:
    api = FastAPI(title="sqclp", version="0.1.0")

    @api.post("/check", response_model=CheckResponse)
    def check(req: CheckRequest) -> CheckResponse:
        try:
            prog = parse_program(req.program)
        except _INPUT_ERRORS as exc:
            return CheckResponse(ok=False, diagnostics=[str(exc)])
        preds = sorted(
            n for n, (c, _) in prog.signature.items() if c == "pred"
        )
        return CheckResponse(
            ok=True,
            qdom=prog.qdom.name,
            cdom=prog.cdom,
            clauses=len(prog.clauses),
            predicates=preds,
        )

    @api.post("/solve", response_model=SolveResponse)
    def solve_goal(req: SolveRequest) -> SolveResponse:
        prog = _load_program(req.program)
        dom = prog.qdom
        try:
            goal = parse_goal(req.goal, dom)
            seed = prog.store(parse_constraints(req.constraints))
        except _INPUT_ERRORS as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        opts = SolveOptions(
            depth_limit=req.depth_limit,
            universe_depth=req.universe_depth,
            max_solutions=req.max_solutions,
            store_seed=seed,
        )
        diag: list = []
        answers = []
        for sol in solve(prog, goal, opts, diag=diag):
            verdict = is_solution(prog, goal, sol, req.depth_limit)
            answers.append(
                AnswerModel(
                    sigma={v: format_term(t) for v, t in sol.sigma},
                    mu={w: dom.format(d) for w, d in sol.mu},
                    store=[str_atom for str_atom in _store_strings(sol)],
                    verified=_tri_name(verdict),
                )
            )
        return SolveResponse(answers=answers, diagnostics=sorted(set(diag)))

    @api.post("/model", response_model=ModelResponse)
    def model(req: ModelRequest) -> ModelResponse:
        prog = _load_program(req.program)
        try:
            store = prog.store(parse_constraints(req.constraints))
        except _INPUT_ERRORS as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        uni = make_universe(prog, store, extra_vars=req.extra_vars,
                            depth=req.universe_depth)
        interp, iters, converged = tp_lfp(prog, store, uni, req.max_iters)
        gens = [GeneratorModel(**g) for g in interp_to_json(prog.qdom, interp)]
        gens.sort(key=lambda g: (g.atom, g.degree))
        return ModelResponse(generators=gens, iterations=iters,
                             converged=converged)

    @api.post("/prove", response_model=ProveResponse)
    def prove(req: ProveRequest) -> ProveResponse:
        prog = _load_program(req.program)
        try:
            phi = qcatom_from_json(prog, req.qcatom.model_dump())
        except _INPUT_ERRORS as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        diag: list = []
        tree = derive(prog, phi, req.depth_limit, diag=diag)
        if tree is None:
            return ProveResponse(found=False, diagnostics=sorted(set(diag)))
        stats = proof_stats(tree)
        return ProveResponse(
            found=True,
            proof=proof_to_json(prog.qdom, tree),
            inferences=stats.size,
            sqda_steps=stats.defined_steps,
            checked=_tri_name(check_proof(prog, tree)),
            diagnostics=sorted(set(diag)),
        )

    @api.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest) -> VerifyResponse:
        prog = _load_program(req.program)
        if (req.proof is None) == (req.solution is None):
            raise HTTPException(
                status_code=400,
                detail="provide exactly one of 'proof' or 'solution'",
            )
        if req.proof is not None:
            try:
                tree = proof_from_json(prog, req.proof)
            except _INPUT_ERRORS as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            return VerifyResponse(verdict=_tri_name(check_proof(prog, tree)))
        if req.goal is None:
            raise HTTPException(
                status_code=400,
                detail="verifying a solution requires 'goal'",
            )
        try:
            goal = parse_goal(req.goal, prog.qdom)
            sol = _solution_from_model(prog, req.solution)
        except _INPUT_ERRORS as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        diag: list = []
        verdict = is_solution(prog, goal, sol, req.depth_limit, diag=diag)
        return VerifyResponse(verdict=_tri_name(verdict),
                              diagnostics=sorted(set(diag)))

    return api


def _store_strings(sol: GoalSolution) -> list[str]:
    from ..program import format_atom

    return [format_atom(a) for a in sol.store.atoms]


def _solution_from_model(prog: Program, model) -> GoalSolution:
    sigma = tuple(sorted((v, parse_term(t)) for v, t in model.sigma.items()))
    mu = tuple(sorted((w, prog.qdom.parse(d)) for w, d in model.mu.items()))
    atoms = [a for s in model.store for a in parse_constraints(s)]
    return GoalSolution(sigma, mu, prog.store(atoms))


app = create_app()
