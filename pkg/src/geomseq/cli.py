"""Command line client for the analysis service.

The CLI parses files and flags locally, then drives the HTTP API: in-process
against the bundled app by default, or against a remote instance with
``--server``.  Reports are written through the canonical serializer, so the
same inputs always produce byte-identical files.

Exit codes: 0 success, 1 selftest failures, 2 invalid input files,
3 parameter errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .report import ALL_SPACES, canonical_json
from .sequences import GeoSeq, SequenceFormatError, ingest_lambda, ingest_pseq, ingest_sequence, write_sequence

EXIT_OK = 0
EXIT_SELFTEST_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_PARAMETER_ERROR = 3


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2; flag problems are parameter errors here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAMETER_ERROR, f"{self.prog}: error: {message}\n")


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        # starlette's test-client notice subclasses UserWarning, so ignore all
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _parse_params(pairs: list[str]) -> dict:
    params: dict = {}
    for pair in pairs:
        if "=" not in pair:
            raise _CliError(EXIT_PARAMETER_ERROR, f"parameter {pair!r} is not of the form key=value")
        key, raw = pair.split("=", 1)
        key = key.strip()
        raw = raw.strip()
        try:
            value: object = int(raw)
        except ValueError:
            try:
                value = float(raw)
            except ValueError:
                value = raw
        params[key] = value
    return params


def _collect_params(args) -> dict:
    pairs: list[str] = []
    if args.params:
        pairs.extend(p for p in args.params.split(",") if p.strip())
    pairs.extend(args.param or [])
    return _parse_params(pairs)


def _sequence_payload(args) -> dict:
    if bool(args.input) == bool(args.generate):
        raise _CliError(EXIT_PARAMETER_ERROR, "provide exactly one of --input or --generate")
    if args.input:
        try:
            seq = ingest_sequence(args.input, fmt=args.format)
        except (SequenceFormatError, OSError, ValueError) as exc:
            raise _CliError(EXIT_INVALID_INPUT, f"cannot read sequence: {exc}")
        return {"logs": [float(v) for v in seq.logs], "source": seq.source}
    if not args.n:
        raise _CliError(EXIT_PARAMETER_ERROR, "--generate requires --n")
    return {"generator": {"family": args.generate, "n": args.n, "params": _collect_params(args)}}


def _lambda_payload(args) -> dict:
    token = args.lam
    if token == "n":
        return {"kind": "n"}
    if token == "const1":
        return {"kind": "const1", "unbounded": False}
    try:
        lam = ingest_lambda(token)
    except (SequenceFormatError, OSError) as exc:
        raise _CliError(EXIT_INVALID_INPUT, f"cannot read lambda file: {exc}")
    return {"kind": "values", "values": [float(v) for v in lam.values], "unbounded": lam.unbounded}


def _p_payload(args) -> dict | None:
    token = args.p
    if token is None:
        return None
    try:
        return {"kind": "const", "value": float(token)}
    except ValueError:
        pass
    try:
        p = ingest_pseq(token)
    except (SequenceFormatError, OSError) as exc:
        raise _CliError(EXIT_INVALID_INPUT, f"cannot read p file: {exc}")
    return {"kind": "values", "values": [float(v) for v in p.values]}


def _orlicz_payload(args) -> dict | None:
    if args.orlicz is None:
        return None
    try:
        spec = json.loads(args.orlicz)
    except json.JSONDecodeError as exc:
        raise _CliError(EXIT_PARAMETER_ERROR, f"--orlicz is not valid JSON: {exc}")
    if not isinstance(spec, dict):
        raise _CliError(EXIT_PARAMETER_ERROR, "--orlicz must be a JSON object")
    return spec


def _post(client, path: str, payload: dict):
    resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        raise _CliError(EXIT_PARAMETER_ERROR, f"service rejected the request: {detail}")
    return resp.json()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    payload = {
        "sequence": _sequence_payload(args),
        "m": args.m,
        "lam": _lambda_payload(args),
        "eps_logs": [float(v) for v in args.eps.split(",") if v.strip()],
        "tol": args.tol,
        "tail_fraction": args.tail_fraction,
        "tol_rho": args.tol_rho,
        "descriptor": args.input or f"generator:{args.generate}",
    }
    if args.spaces:
        payload["spaces"] = [s.strip() for s in args.spaces.split(",") if s.strip()]
    orlicz = _orlicz_payload(args)
    if orlicz is not None:
        payload["orlicz"] = orlicz
    p = _p_payload(args)
    if p is not None:
        payload["p"] = p
    with _client(args.server) as client:
        report = _post(client, "/analyze", payload)
    _emit(canonical_json(report) + "\n", args.out)
    return EXIT_OK


def cmd_generate(args) -> int:
    payload = {"generator": {"family": args.family, "n": args.n, "params": _collect_params(args)}}
    with _client(args.server) as client:
        data = _post(client, "/generate", payload)
    seq = GeoSeq(logs=data["logs"], source=data["source"])
    if args.out:
        write_sequence(seq, args.out, fmt="log")
    else:
        write_sequence(seq, sys.stdout, fmt="log")
    return EXIT_OK


def cmd_selftest(args) -> int:
    seed = args.seed
    env_seed = os.environ.get("GEOMSEQ_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError:
            raise _CliError(EXIT_PARAMETER_ERROR, f"GEOMSEQ_SEED must be an integer, got {env_seed!r}")
    payload: dict = {"seed": seed}
    if args.suites:
        payload["suites"] = [s.strip() for s in args.suites.split(",") if s.strip()]
    with _client(args.server) as client:
        data = _post(client, "/selftest", payload)
    print(f"selftest seed {data['seed']}")
    for suite in data["suites"]:
        print(f"suite {suite['name']}: {suite['passed']} passed, {suite['failed']} failed")
        for failure in suite["failures"]:
            print(f"  FAIL {failure}")
    print(f"total: {data['passed']} passed, {data['failed']} failed")
    return EXIT_OK if data["failed"] == 0 else EXIT_SELFTEST_FAILED


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def _add_common_sequence_flags(sp) -> None:
    sp.add_argument("--input", help="sequence file (one numeric per line, '#format: raw|log' header)")
    sp.add_argument("--format", choices=("raw", "log"), help="override the file's #format header")
    sp.add_argument("--generate", metavar="FAMILY", help="generate the input instead of reading a file")
    sp.add_argument("--n", type=int, help="generated sequence length")
    sp.add_argument("--params", help="generator parameters, comma-separated key=value pairs")
    sp.add_argument(
        "--param",
        action="append",
        metavar="KEY=VALUE",
        help="single generator parameter; repeatable, values may contain commas",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="geomseq", description=__doc__)
    parser.add_argument("--server", help="base URL of a running service; default runs in process")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("analyze", help="run membership, norm, density and dual analyses")
    _add_common_sequence_flags(sp)
    sp.add_argument("--m", type=int, default=1, help="difference order (default 1)")
    sp.add_argument(
        "--lambda",
        dest="lam",
        default="n",
        help="window weights: 'n', 'const1', or a lambda file path (default n)",
    )
    sp.add_argument(
        "--spaces",
        help=f"comma list of analysis tokens among {','.join(ALL_SPACES)} (default all applicable)",
    )
    sp.add_argument("--eps", default="0.1,0.5,1.0", help="comma list of log-domain thresholds")
    sp.add_argument("--tol", type=float, default=1e-2, help="verdict tolerance on logs (default 1e-2)")
    sp.add_argument("--tail-fraction", type=float, default=0.2, help="trailing fraction used for tails")
    sp.add_argument("--tol-rho", type=float, default=1e-6, help="paranorm bisection tolerance")
    sp.add_argument("--orlicz", help='Orlicz spec JSON, e.g. \'{"family":"power","q":2}\'')
    sp.add_argument("--p", help="exponent sequence: a constant or a file path (default 1)")
    sp.add_argument("--out", help="report path (default stdout)")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("generate", help="write a sequence file from a builtin family")
    sp.add_argument("--family", required=True, help="generator family name")
    sp.add_argument("--n", type=int, required=True, help="sequence length")
    sp.add_argument("--params", help="generator parameters, comma-separated key=value pairs")
    sp.add_argument("--param", action="append", metavar="KEY=VALUE", help="single generator parameter")
    sp.add_argument("--out", help="output path (default stdout), log format with provenance header")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("selftest", help="run the seeded invariant suites")
    sp.add_argument("--seed", type=int, default=0, help="suite seed (GEOMSEQ_SEED overrides)")
    sp.add_argument("--suites", help="comma list of suite names (default all)")
    sp.set_defaults(func=cmd_selftest)

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)
    sp.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"geomseq: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
