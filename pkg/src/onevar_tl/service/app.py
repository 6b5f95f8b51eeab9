"""FastAPI service wrapping the core package.

The handler functions raise ``RequestError`` for anything wrong with the
input; the app maps that to 422 and the CLI maps it to exit code 2.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..cgs import cgs_from_json, cgs_to_dot, cgs_to_json, mc_atl, validate_cgs
from ..embedding import (
    embed,
    gadget_model_cgs,
    gadget_model_kripke,
    translation_to_json,
)
from ..kripke import (
    ModelError,
    kripke_from_json,
    kripke_to_dot,
    kripke_to_json,
    mc_ctl,
    mc_ctlstar,
    validate,
)
from ..satsearch import SearchBudgetExceeded, bounded_sat, bounded_sat_cgs
from ..syntax import (
    AgentSet,
    FragmentError,
    LogicId,
    ParseError,
    SortError,
    parse,
)
from ..verification import run_suites
from .schemas import (
    GadgetRequest,
    GadgetResponse,
    Logic,
    ModelCheckRequest,
    ModelCheckResponse,
    SatRequest,
    SatResponse,
    SuiteReport,
    TranslateRequest,
    TranslateResponse,
    VerifyRequest,
    VerifyResponse,
    Witness,
)


class RequestError(ValueError):
    """Invalid input to a service operation."""


_INPUT_ERRORS = (ParseError, SortError, FragmentError, ModelError, ValueError)


def _logic_id(logic: Logic) -> LogicId:
    return LogicId(logic.value)


def handle_translate(req: TranslateRequest) -> TranslateResponse:
    try:
        logic = _logic_id(req.logic)
        agents = AgentSet(req.agents)
        f = parse(req.formula, logic, agents)
        tr = embed(f, logic, agents if logic.alternating else None)
    except _INPUT_ERRORS as exc:
        raise RequestError(str(exc)) from exc
    return TranslateResponse(**translation_to_json(tr))


def handle_modelcheck(req: ModelCheckRequest) -> ModelCheckResponse:
    try:
        logic = _logic_id(req.logic)
        is_cgs_model = "agents" in req.model
        if logic in (LogicId.CTL, LogicId.CTLSTAR):
            if is_cgs_model:
                raise RequestError("branching-time logics need a Kripke model file")
            m = kripke_from_json(req.model)
            report = validate(m)
            if not report.ok:
                raise RequestError(f"invalid model: non-serial states {report.non_serial_states}")
            agents = AgentSet(1)
            f = parse(req.formula, logic, agents)
            states = mc_ctl(m, f) if logic is LogicId.CTL else mc_ctlstar(m, f)
            names = list(m.names) if m.names else None
            n_states = m.n_states
        elif logic is LogicId.ATL:
            if not is_cgs_model:
                raise RequestError("atl needs a concurrent game model file")
            m = cgs_from_json(req.model)
            report = validate_cgs(m)
            if not report.ok:
                raise RequestError(f"invalid model: {report.problems[0]}")
            f = parse(req.formula, logic, AgentSet(m.agents))
            states = mc_atl(m, f)
            names = list(m.names) if m.names else None
            n_states = m.n_states
        else:
            raise RequestError("atlstar model checking is not supported")
        designated_holds = None
        if req.designated is not None:
            if not 0 <= req.designated < n_states:
                raise RequestError(f"designated state {req.designated} out of range")
            designated_holds = req.designated in states
    except RequestError:
        raise
    except _INPUT_ERRORS as exc:
        raise RequestError(str(exc)) from exc
    return ModelCheckResponse(
        satisfying_states=sorted(states),
        state_names=names,
        designated_holds=designated_holds,
    )


def handle_sat(req: SatRequest) -> SatResponse:
    try:
        logic = _logic_id(req.logic)
        agents = AgentSet(req.agents)
        f = parse(req.formula, logic, agents)
        if logic in (LogicId.CTL, LogicId.CTLSTAR):
            verdict = bounded_sat(f, logic, req.max_states, jobs=req.jobs)
            to_json = kripke_to_json
        elif logic is LogicId.ATL:
            verdict = bounded_sat_cgs(f, agents, req.max_states, req.max_actions,
                                      budget=req.budget)
            to_json = cgs_to_json
        else:
            raise RequestError("bounded search supports ctl, ctlstar and atl")
    except SearchBudgetExceeded as exc:
        raise RequestError(f"search budget exceeded: {exc}") from exc
    except RequestError:
        raise
    except _INPUT_ERRORS as exc:
        raise RequestError(str(exc)) from exc
    witness = None
    if verdict.witness is not None:
        model, state = verdict.witness
        witness = Witness(model=to_json(model), state=state)
    return SatResponse(
        status=verdict.status,
        witness=witness,
        models_examined=verdict.models_examined,
        bound=verdict.bound,
    )


def handle_gadget(req: GadgetRequest) -> GadgetResponse:
    try:
        if req.flavor == "kripke":
            m = gadget_model_kripke(req.m)
            as_json, as_dot = kripke_to_json, kripke_to_dot
        elif req.flavor == "cgs":
            m = gadget_model_cgs(req.m, AgentSet(req.agents))
            as_json, as_dot = cgs_to_json, cgs_to_dot
        else:
            raise RequestError("flavor must be 'kripke' or 'cgs'")
        if req.format == "dot":
            return GadgetResponse(dot=as_dot(m, designated=0))
        if req.format == "json":
            return GadgetResponse(model=as_json(m))
        raise RequestError("format must be 'json' or 'dot'")
    except RequestError:
        raise
    except _INPUT_ERRORS as exc:
        raise RequestError(str(exc)) from exc


def handle_verify(req: VerifyRequest) -> VerifyResponse:
    try:
        results = run_suites(req.suites, seed=req.seed, cases=req.cases, max_m=req.max_m)
    except _INPUT_ERRORS as exc:
        raise RequestError(str(exc)) from exc
    reports = [SuiteReport(**r.to_json()) for r in results]
    return VerifyResponse(passed=all(r.passed for r in reports), suites=reports)


def create_app() -> FastAPI:
    app = FastAPI(
        title="onevar-tl",
        description="Temporal logic toolbox: model checking, single-variable "
                    "translation, bounded satisfiability search",
        version="0.1.0",
    )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/translate", response_model=TranslateResponse)
    def translate(req: TranslateRequest) -> TranslateResponse:
        return _wrap(handle_translate, req)

    @app.post("/modelcheck", response_model=ModelCheckResponse)
    def modelcheck(req: ModelCheckRequest) -> ModelCheckResponse:
        return _wrap(handle_modelcheck, req)

    @app.post("/sat", response_model=SatResponse)
    def sat(req: SatRequest) -> SatResponse:
        return _wrap(handle_sat, req)

    @app.post("/gadget", response_model=GadgetResponse)
    def gadget(req: GadgetRequest) -> GadgetResponse:
        return _wrap(handle_gadget, req)

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest) -> VerifyResponse:
        return _wrap(handle_verify, req)

    return app


def _wrap(handler, req):
    try:
        return handler(req)
    except RequestError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


app = create_app()
