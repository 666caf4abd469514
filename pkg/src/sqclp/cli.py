"""Command-line client for the HTTP service.

By default requests are served in-process; `--server URL` targets a
running instance instead.  Results go to stdout as JSON, diagnostics to
stderr.  Exit codes: 0 success, 1 failure (check errors, invalid proof,
refuted solution, no proof found), 2 usage or input error, 3 a verdict
came back unknown.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import httpx

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_UNKNOWN = 3


def _client(server: Optional[str]) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=300.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _read_file(path: str, what: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        print("cannot read %s: %s" % (what, exc), file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _json_arg(value: str, what: str):
    """Inline JSON, or the contents of a file named by `@path` or a bare
    path that does not look like JSON."""
    text = value
    if value.startswith("@"):
        text = _read_file(value[1:], what)
    elif not value.lstrip().startswith(("{", "[")):
        text = _read_file(value, what)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        print("bad JSON for %s: %s" % (what, exc), file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code == 400:
        print(resp.json().get("detail", "bad request"), file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    if resp.status_code != 200:
        print("service error %d: %s" % (resp.status_code, resp.text),
              file=sys.stderr)
        raise SystemExit(EXIT_FAIL)
    return resp.json()


def _emit(data: dict) -> None:
    json.dump(data, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _verdict_code(verdict: str) -> int:
    return {"true": EXIT_OK, "false": EXIT_FAIL}.get(verdict, EXIT_UNKNOWN)


def _cmd_check(args, client) -> int:
    data = _post(client, "/check", {"program": _read_file(args.file, "program")})
    _emit(data)
    if not data["ok"]:
        for line in data["diagnostics"]:
            print(line, file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _cmd_solve(args, client) -> int:
    data = _post(client, "/solve", {
        "program": _read_file(args.file, "program"),
        "goal": args.goal,
        "constraints": args.constraints,
        "depth_limit": args.depth,
        "universe_depth": args.universe_depth,
        "max_solutions": args.max,
    })
    _emit(data)
    for line in data["diagnostics"]:
        print(line, file=sys.stderr)
    if not data["answers"]:
        return EXIT_FAIL
    worst = min(_verdict_code(a["verified"]) for a in data["answers"])
    if any(a["verified"] == "unknown" for a in data["answers"]):
        return EXIT_UNKNOWN
    return worst


def _cmd_model(args, client) -> int:
    data = _post(client, "/model", {
        "program": _read_file(args.file, "program"),
        "constraints": args.constraints,
        "universe_depth": args.universe_depth,
        "max_iters": args.iters,
        "extra_vars": args.extra_var,
    })
    _emit(data)
    if not data["converged"]:
        print("transformer did not converge in %d iterations" % args.iters,
              file=sys.stderr)
        return EXIT_UNKNOWN
    return EXIT_OK


def _cmd_prove(args, client) -> int:
    qcatom = _json_arg(args.qcatom, "qcatom")
    data = _post(client, "/prove", {
        "program": _read_file(args.file, "program"),
        "qcatom": qcatom,
        "depth_limit": args.depth,
    })
    _emit(data)
    for line in data["diagnostics"]:
        print(line, file=sys.stderr)
    if not data["found"]:
        return EXIT_UNKNOWN if data["diagnostics"] else EXIT_FAIL
    return _verdict_code(data["checked"])


def _cmd_verify(args, client) -> int:
    payload: dict = {
        "program": _read_file(args.file, "program"),
        "depth_limit": args.depth,
    }
    if args.proof:
        payload["proof"] = _json_arg(args.proof, "proof")
    if args.solution:
        payload["solution"] = _json_arg(args.solution, "solution")
        if not args.goal:
            print("--solution requires --goal", file=sys.stderr)
            return EXIT_USAGE
        payload["goal"] = args.goal
    data = _post(client, "/verify", payload)
    _emit(data)
    for line in data["diagnostics"]:
        print(line, file=sys.stderr)
    return _verdict_code(data["verdict"])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sqclp",
        description="check, solve, model, prove and verify logic programs "
                    "with qualification values and proximity relations",
    )
    p.add_argument("--server", help="URL of a running service "
                                    "(default: serve in-process)")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="parse a program and report problems")
    c.add_argument("file")
    c.set_defaults(func=_cmd_check)

    s = sub.add_parser("solve", help="enumerate answers for a goal")
    s.add_argument("file")
    s.add_argument("--goal", required=True)
    s.add_argument("--constraints", default="",
                   help="seed constraint store, comma-separated atoms")
    s.add_argument("--depth", type=int, default=6)
    s.add_argument("--universe-depth", type=int, default=2)
    s.add_argument("--max", type=int, default=20)
    s.set_defaults(func=_cmd_solve)

    m = sub.add_parser("model", help="iterate the consequence operator")
    m.add_argument("file")
    m.add_argument("--constraints", default="")
    m.add_argument("--universe-depth", type=int, default=2)
    m.add_argument("--iters", type=int, default=10)
    m.add_argument("--extra-var", action="append", default=[],
                   help="add a free variable to the term universe")
    m.set_defaults(func=_cmd_model)

    pr = sub.add_parser("prove", help="search for a proof of a qc-atom")
    pr.add_argument("file")
    pr.add_argument("--qcatom", required=True,
                    help='JSON {"atom","degree","store"} inline or @file')
    pr.add_argument("--depth", type=int, default=6)
    pr.set_defaults(func=_cmd_prove)

    v = sub.add_parser("verify", help="check a proof tree or a solution")
    v.add_argument("file")
    v.add_argument("--proof", help="proof-tree JSON inline or @file")
    v.add_argument("--solution", help="solution JSON inline or @file")
    v.add_argument("--goal", help="goal text, required with --solution")
    v.add_argument("--depth", type=int, default=6)
    v.set_defaults(func=_cmd_verify)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if bool(getattr(args, "proof", None)) == bool(getattr(args, "solution", None)) \
            and args.command == "verify":
        print("provide exactly one of --proof or --solution", file=sys.stderr)
        return EXIT_USAGE
    with _client(args.server) as client:
        try:
            return args.func(args, client)
        except SystemExit as exc:
            return int(exc.code or 0)
        except httpx.HTTPError as exc:
            print("cannot reach service: %s" % exc, file=sys.stderr)
            return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
