"""Command-line front end.

A thin client over the service layer: every command builds the same
request model the HTTP API takes and either calls the handler in process
(the default) or posts it to a running server given via ``--server``.

Exit codes: 0 success; 1 a checked property fails (designated state,
verification counterexample); 2 bad input; 3 a search or suite stopped on
its budget.
"""

from __future__ import annotations

import json
import os
import sys

import click

from .service import schemas
from .service.app import (
    RequestError,
    handle_gadget,
    handle_modelcheck,
    handle_sat,
    handle_translate,
    handle_verify,
)

DEFAULT_SEED = 42
SEED_ENV = "ONEVAR_TL_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise click.UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


def _dispatch(ctx: click.Context, path: str, handler, request):
    """Run in process, or POST to --server when one is configured."""
    server = ctx.obj.get("server")
    if server is None:
        try:
            return handler(request)
        except RequestError as exc:
            raise click.ClickException(str(exc))
    import httpx

    resp = httpx.post(f"{server.rstrip('/')}/{path}", json=request.model_dump(),
                      timeout=600.0)
    if resp.status_code == 422:
        detail = resp.json().get("detail", resp.text)
        raise click.ClickException(str(detail))
    resp.raise_for_status()
    response_type = {
        "translate": schemas.TranslateResponse,
        "modelcheck": schemas.ModelCheckResponse,
        "sat": schemas.SatResponse,
        "gadget": schemas.GadgetResponse,
        "verify": schemas.VerifyResponse,
    }[path]
    return response_type.model_validate(resp.json())


def _read_formula(formula: str | None, file: str | None) -> str:
    if (formula is None) == (file is None):
        raise click.UsageError("give a formula either inline or via --file")
    if file is not None:
        with open(file) as fh:
            return fh.read().strip()
    return formula


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="Send requests to a running onevar-tl service instead of "
                   "computing in process.")
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Temporal logic toolbox: CTL, CTL*, ATL and ATL* parsing, model
    checking, single-variable translation and bounded satisfiability."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


_logic_option = click.option(
    "--logic", type=click.Choice([l.value for l in schemas.Logic]), required=True)


@main.command()
@_logic_option
@click.option("--agents", type=int, default=1, show_default=True)
@click.option("--file", "file_", default=None, help="Read the formula from a file.")
@click.option("--json", "as_json", is_flag=True, help="Print the raw JSON response.")
@click.argument("formula", required=False)
@click.pass_context
def translate(ctx, logic, agents, file_, as_json, formula):
    """Translate a formula into the single-variable fragment of its logic."""
    text = _read_formula(formula, file_)
    req = schemas.TranslateRequest(formula=text, logic=logic, agents=agents)
    resp = _dispatch(ctx, "translate", handle_translate, req)
    if as_json:
        click.echo(resp.model_dump_json(indent=2))
        return
    click.echo(f"source : {resp.source}")
    click.echo(f"primed : {resp.primed}")
    click.echo(f"theta  : {resp.theta}")
    click.echo(f"hat    : {resp.hat}")
    click.echo(f"star   : {resp.star}")
    for var, marker in resp.sigma.items():
        click.echo(f"sigma {var} -> {marker}")
    click.echo(f"variables: {resp.n}, guard: p{resp.guard}, output variable: p{resp.out_var}")
    click.echo(f"sizes: source {resp.sizes['source']}, star {resp.sizes['star']}")


@main.command()
@_logic_option
@click.option("--model", "model_file", required=True, type=click.Path(exists=True),
              help="Model file (Kripke or CGS JSON).")
@click.option("--designated", type=int, default=None,
              help="Exit 1 unless this state satisfies the formula.")
@click.option("--file", "file_", default=None, help="Read the formula from a file.")
@click.option("--json", "as_json", is_flag=True)
@click.argument("formula", required=False)
@click.pass_context
def modelcheck(ctx, logic, model_file, designated, file_, as_json, formula):
    """List the states of a model satisfying a formula."""
    text = _read_formula(formula, file_)
    with open(model_file) as fh:
        model = json.load(fh)
    req = schemas.ModelCheckRequest(model=model, formula=text, logic=logic,
                                    designated=designated)
    resp = _dispatch(ctx, "modelcheck", handle_modelcheck, req)
    if as_json:
        click.echo(resp.model_dump_json(indent=2))
    else:
        names = resp.state_names
        shown = [names[s] if names else str(s) for s in resp.satisfying_states]
        click.echo(" ".join(shown) if shown else "(no states)")
    if resp.designated_holds is False:
        sys.exit(1)


@main.command()
@_logic_option
@click.option("--max-states", type=int, default=3, show_default=True)
@click.option("--agents", type=int, default=1, show_default=True)
@click.option("--max-actions", type=int, default=2, show_default=True,
              help="Action bound for ATL searches.")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Worker threads for the model sweep (same verdict regardless).")
@click.option("--budget", type=int, default=None,
              help="Abort an ATL search after this many models (exit 3).")
@click.option("--file", "file_", default=None)
@click.option("--json", "as_json", is_flag=True)
@click.argument("formula", required=False)
@click.pass_context
def sat(ctx, logic, max_states, agents, max_actions, jobs, budget, file_, as_json, formula):
    """Bounded satisfiability search; SAT verdicts carry a witness model."""
    text = _read_formula(formula, file_)
    req = schemas.SatRequest(formula=text, logic=logic, max_states=max_states,
                             agents=agents, max_actions=max_actions, jobs=jobs,
                             budget=budget)
    try:
        resp = _dispatch(ctx, "sat", handle_sat, req)
    except click.ClickException as exc:
        if "budget exceeded" in str(exc):
            click.echo(f"BUDGET EXCEEDED: {exc}", err=True)
            sys.exit(3)
        raise
    if as_json:
        click.echo(resp.model_dump_json(indent=2))
        return
    click.echo(f"{resp.status} (examined {resp.models_examined} models, "
               f"bound {resp.bound})")
    if resp.witness is not None:
        click.echo(f"witness state: {resp.witness.state}")
        click.echo(json.dumps(resp.witness.model))


@main.command()
@click.argument("m", type=int)
@click.option("--flavor", type=click.Choice(["kripke", "cgs"]), default="kripke",
              show_default=True)
@click.option("--agents", type=int, default=2, show_default=True,
              help="Agent count for the cgs flavor.")
@click.option("--json", "as_json", is_flag=True, help="Emit model JSON (default).")
@click.option("--dot", "as_dot", is_flag=True, help="Emit a DOT graph instead.")
@click.option("-o", "--output", type=click.Path(), default=None)
@click.pass_context
def gadget(ctx, m, flavor, agents, as_json, as_dot, output):
    """Emit the m-th gadget model."""
    if as_json and as_dot:
        raise click.UsageError("choose one of --json / --dot")
    fmt = "dot" if as_dot else "json"
    req = schemas.GadgetRequest(m=m, flavor=flavor, agents=agents, format=fmt)
    resp = _dispatch(ctx, "gadget", handle_gadget, req)
    text = resp.dot if fmt == "dot" else json.dumps(resp.model, indent=2)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


@main.command()
@click.argument("suites", nargs=-1)
@click.option("--seed", type=int, default=None,
              help=f"Random seed (default {DEFAULT_SEED}, or ${SEED_ENV}).")
@click.option("--cases", type=int, default=None, help="Cases per randomized suite.")
@click.option("--max-m", type=int, default=5, show_default=True,
              help="Largest gadget index for the exhaustive suite.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def verify(ctx, suites, seed, cases, max_m, as_json):
    """Run property suites E1..E6 (default: all)."""
    req = schemas.VerifyRequest(
        suites=list(suites) or ["all"],
        seed=seed if seed is not None else _default_seed(),
        cases=cases,
        max_m=max_m,
    )
    resp = _dispatch(ctx, "verify", handle_verify, req)
    if as_json:
        click.echo(resp.model_dump_json(indent=2))
    else:
        for suite in resp.suites:
            status = "PASS" if suite.passed else "FAIL"
            note = f" [{suite.note}]" if suite.note else ""
            click.echo(f"{suite.name}: {status} ({suite.cases} cases, "
                       f"{suite.elapsed_s:.1f}s){note}")
            for failure in suite.failures:
                click.echo("counterexample:")
                for line in failure.splitlines():
                    click.echo(f"  {line}")
    if not resp.passed:
        sys.exit(1)
    if any(s.note for s in resp.suites):
        sys.exit(3)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("onevar_tl.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
