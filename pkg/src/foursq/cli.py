"""Command-line front end.

Every command prints line-delimited JSON records
``{"schema_version": 1, "kind": ..., "payload": ...}`` unless ``--human``
is given.  Exit codes:

    0  success
    1  a campaign finished with failures
    2  usage error
    3  domain error (parameters outside the claim's range)
    4  no witness found
    5  resource limit
    6  internal invariant violated
    7  configuration or witness-log error

Settings for ``verify`` are resolved as: command-line flag, then the
campaign entry of ``--config``, then the config file's top-level
``workers``, then ``$FOURSQ_WORKERS``, then the built-in default.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterator

from . import cauchy, constructive, harness
from .errors import (
    ConfigError,
    DomainError,
    InternalInvariantViolation,
    LogIntegrityError,
    NotFound,
    ResourceLimit,
)
from .model import FormId

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NOT_FOUND = 4
EXIT_RESOURCE = 5
EXIT_INTERNAL = 6
EXIT_CONFIG = 7

KINDS = ("witness", "campaign", "bounds", "report", "error")

REPRESENT_TARGETS = ("thm1.1", "cor1.2", "cor1.3i", "cor1.3ii", "thm1.2i", "thm1.2ii", "thm1.2iii", "thm1.3", "thm1.4")


@dataclass(frozen=True)
class OutputRecord:
    kind: str
    payload: dict
    schema_version: int = SCHEMA_VERSION

    def to_line(self) -> str:
        return json.dumps({"schema_version": self.schema_version, "kind": self.kind, "payload": self.payload})

    @classmethod
    def from_line(cls, line: str) -> "OutputRecord":
        d = json.loads(line)
        if set(d) != {"schema_version", "kind", "payload"}:
            raise ConfigError(f"not an output record: {line[:80]!r}")
        if d["kind"] not in KINDS:
            raise ConfigError(f"unknown record kind {d['kind']!r}")
        return cls(d["kind"], d["payload"], d["schema_version"])


def read_records(stream: IO[str]) -> Iterator[OutputRecord]:
    for line in stream:
        if line.strip():
            yield OutputRecord.from_line(line)


def fraction_from_json(d: dict) -> Fraction:
    return Fraction(d["num"], d["den"])


# ---------------------------------------------------------------------------
# argument parsing


def _positive(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer: {s!r}")
    return v


def _nonneg(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {s!r}")
    return v


def _coeffs(s: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _add_params(p):
    p.add_argument("--d", type=_positive, help="thm1.1: coefficient d (4d^2+1 prime)")
    p.add_argument("--k", type=_positive, help="thm1.1, thm1.4: exponent")
    p.add_argument("--lambda", dest="lam", type=int, help="fixed linear value")
    p.add_argument("--delta", type=int, choices=(0, 1), help="thm1.3: 0 or 1")
    p.add_argument("--variant", choices=("i", "ii", "iii"), help="thm1.4 variant")
    p.add_argument("--strict", action="store_true", default=None, help="thm1.4: enforce the proven size gates")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="foursq", description="Constrained sums of four squares.")
    ap.add_argument("--human", action="store_true", help="readable text instead of JSON records")
    ap.add_argument("--config", help="JSON config file with defaults and named campaigns")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("represent", help="decompose one integer")
    p.add_argument("--target", required=True, choices=REPRESENT_TARGETS)
    p.add_argument("--n", required=True, type=int)
    _add_params(p)

    p = sub.add_parser("verify", help="run a verification campaign")
    p.add_argument("--campaign", help="name of a campaign in the config file")
    p.add_argument("--target", choices=tuple(harness.TARGETS))
    p.add_argument("--from", dest="n_lo", type=_nonneg)
    p.add_argument("--to", dest="n_hi", type=_nonneg)
    p.add_argument("--mode", choices=harness.MODES)
    p.add_argument("--workers", type=_positive)
    p.add_argument("--witness-log")
    p.add_argument("--parity", choices=("odd", "even"))
    p.add_argument("--allow-ineffective", action="store_true", help="exit 0 when the only failures are NotFound")
    _add_params(p)

    p = sub.add_parser("conjecture", help="1-3-5 check or hitting-set exploration")
    p.add_argument("--id", required=True, choices=("135", "density", "finite", "explore"))
    p.add_argument("--n-max", required=True, type=_nonneg)
    p.add_argument("--n-min", type=_nonneg, default=1)
    p.add_argument("--coeffs", type=_coeffs, help="linear coefficients, e.g. 1,1,1,1")
    p.add_argument("--form", help="form id for --id explore (1111, 1112, 1122, 1113)")
    p.add_argument("--workers", type=_positive)
    p.add_argument("--values", action="store_true", help="include per-n value sets")

    p = sub.add_parser("bounds", help="the explicit constants a_k, b_k, c_k")
    p.add_argument("--k", required=True, type=_positive)
    p.add_argument("--j", required=True, type=_positive)
    p.add_argument("--l", required=True, type=_positive)

    p = sub.add_parser("check-log", help="re-verify every witness in a log")
    p.add_argument("path")
    return ap


# ---------------------------------------------------------------------------
# config


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(cfg) - {"workers", "campaigns"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def _env_workers() -> int | None:
    raw = os.environ.get("FOURSQ_WORKERS")
    if raw is None or raw == "":
        return None
    try:
        v = int(raw)
    except ValueError:
        raise ConfigError(f"FOURSQ_WORKERS must be a positive integer, got {raw!r}") from None
    if v < 1:
        raise ConfigError(f"FOURSQ_WORKERS must be a positive integer, got {raw!r}")
    return v


def _resolve_workers(flag, cfg, entry) -> int:
    for v in (flag, entry.get("workers"), cfg.get("workers"), _env_workers()):
        if v is not None:
            return v
    return 1


def _params_from_args(args, target: str) -> dict:
    names = harness.TARGETS[target].params
    out = {}
    mapping = {"d": args.d, "k": args.k, "lambda": args.lam, "delta": args.delta, "variant": args.variant}
    for key, val in mapping.items():
        if val is None:
            continue
        if key not in names:
            raise ConfigError(f"target {target} takes no --{key}")
        out[key] = val
    if args.strict is not None:
        if "relaxed" not in names:
            raise ConfigError(f"target {target} takes no --strict")
        out["relaxed"] = not args.strict
    return out


# ---------------------------------------------------------------------------
# commands


def _witness_payload(target, params, n, w) -> dict:
    d = {"target": target, "params": params, "input_n": n}
    d.update(w.to_json())
    return d


def cmd_represent(args, cfg) -> tuple[int, list[OutputRecord]]:
    target = args.target
    p = dict(harness.TARGETS[target].defaults)
    p.update(_params_from_args(args, target))
    n = args.n
    calls = {
        "thm1.1": lambda: constructive.decompose_thm11(n, p["d"], p["k"]),
        "cor1.2": lambda: constructive.decompose_cor12(n),
        "cor1.3i": lambda: constructive.decompose_cor13i(n),
        "cor1.3ii": lambda: constructive.decompose_cor13ii(n),
        "thm1.2i": lambda: constructive.decompose_thm12i(n, p["lambda"]),
        "thm1.2ii": lambda: constructive.decompose_thm12ii(n, p["lambda"]),
        "thm1.2iii": lambda: constructive.decompose_thm12iii(n, p["lambda"]),
        "thm1.3": lambda: constructive.decompose_thm13(n, p["lambda"], p["delta"]),
        "thm1.4": lambda: cauchy.decompose_thm14(n, p["k"], p["variant"], p["relaxed"]),
    }
    w = calls[target]()
    return EXIT_OK, [OutputRecord("witness", _witness_payload(target, p, n, w))]


def cmd_verify(args, cfg) -> tuple[int, list[OutputRecord]]:
    entry = {}
    if args.campaign:
        campaigns = cfg.get("campaigns", {})
        if args.campaign not in campaigns:
            raise ConfigError(f"no campaign named {args.campaign!r} in the config")
        entry = dict(campaigns[args.campaign])
    target = args.target or entry.get("target")
    if not target:
        raise ConfigError("verify needs --target (or --campaign)")
    if target not in harness.TARGETS:
        raise ConfigError(f"unknown target {target!r}")
    params = dict(entry.get("params", {}))
    params.update(_params_from_args(args, target))

    def pick(flag, key, default=None):
        return flag if flag is not None else entry.get(key, default)

    n_lo = pick(args.n_lo, "n_lo")
    n_hi = pick(args.n_hi, "n_hi")
    if n_lo is None or n_hi is None:
        raise ConfigError("verify needs --from and --to")
    default_mode = "construct" if harness.TARGETS[target].construct else "oracle"
    spec = harness.CampaignSpec(
        target,
        params,
        n_lo,
        n_hi,
        pick(args.mode, "mode", default_mode),
        _resolve_workers(args.workers, cfg, entry),
        pick(args.witness_log, "witness_log"),
        pick(args.parity, "parity"),
    )
    res = harness.run(spec)
    payload = res.to_json()
    payload["spec"] = spec.to_json()
    code = EXIT_OK
    if res.failed:
        only_ineffective = res.not_found == len(res.failed)
        code = EXIT_OK if args.allow_ineffective and only_ineffective else EXIT_FAILURES
    return code, [OutputRecord("campaign", payload)]


def cmd_conjecture(args, cfg) -> tuple[int, list[OutputRecord]]:
    if args.id == "135":
        workers = _resolve_workers(args.workers, cfg, {})
        res = harness.check_135(args.n_max, workers)
        return (EXIT_OK if res.ok else EXIT_FAILURES), [OutputRecord("campaign", res.to_json())]
    form = {"density": "1111", "finite": "1112"}.get(args.id, args.form)
    if form is None:
        raise ConfigError("--id explore needs --form")
    coeffs = args.coeffs or (1, 1, 1, 1)
    rep = harness.explore_conjecture(coeffs, FormId.parse(form), args.n_max, args.n_min, args.values)
    return EXIT_OK, [OutputRecord("report", rep)]


def cmd_bounds(args, cfg) -> tuple[int, list[OutputRecord]]:
    return EXIT_OK, [OutputRecord("bounds", cauchy.bounds(args.k, args.j, args.l).to_json())]


def cmd_check_log(args, cfg) -> tuple[int, list[OutputRecord]]:
    header, blocks, lines = harness.read_log(args.path)
    payload = {
        "path": args.path,
        "spec_digest": header["spec_digest"],
        "blocks": len(blocks),
        "witnesses": len(lines),
        "verified": True,
    }
    return EXIT_OK, [OutputRecord("report", payload)]


COMMANDS = {
    "represent": cmd_represent,
    "verify": cmd_verify,
    "conjecture": cmd_conjecture,
    "bounds": cmd_bounds,
    "check-log": cmd_check_log,
}


# ---------------------------------------------------------------------------
# output


def _human(rec: OutputRecord) -> str:
    p = rec.payload
    if rec.kind == "witness":
        cert = ", ".join(f"{k}={v}" for k, v in p["certificate"].items())
        return f"{p['target']} n={p['input_n']}: {tuple(p['tuple'])} [form {p['form']}, {cert}, {p['route']}]"
    if rec.kind == "campaign":
        lines = [
            f"{p['target']} {p['params']} n in [{p['n_lo']}, {p['n_hi']}] mode={p['mode']}",
            f"  checked {p['checked']}  passed {p['passed']}  not applicable {p['not_applicable']}"
            f"  failed {len(p['failed'])}  ({p['duration']:.2f}s)",
        ]
        if p.get("success_rate") is not None:
            lines.append(f"  success rate {p['success_rate']:.4%}")
        for f in p["failed"][:20]:
            lines.append(f"  FAIL n={f['n']}: {f['reason']}")
        if len(p["failed"]) > 20:
            lines.append(f"  ... {len(p['failed']) - 20} more")
        lines.append(f"  digest {p['digest']}")
        return "\n".join(lines)
    if rec.kind == "bounds":
        def show(key):
            v = p[key]
            tag = " (certified upper bound)" if v.get("certified") else ""
            return f"  {key} = {v['num']}/{v['den']} ~ {v['approx']:.6g}{tag}"

        return "\n".join([f"k={p['k']} j={p['j']} l={p['l']}"] + [show(k) for k in ("a", "b", "third", "c")])
    if rec.kind == "error":
        return f"error ({p['type']}): {p['message']}"
    return json.dumps(p, indent=2)


def _emit(records, human, out):
    for rec in records:
        out.write((_human(rec) if human else rec.to_line()) + "\n")


def main(argv=None, out: IO[str] | None = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    errors = [
        (ConfigError, EXIT_CONFIG),
        (LogIntegrityError, EXIT_CONFIG),
        (OSError, EXIT_CONFIG),
        (DomainError, EXIT_DOMAIN),
        (NotFound, EXIT_NOT_FOUND),
        (ResourceLimit, EXIT_RESOURCE),
        (InternalInvariantViolation, EXIT_INTERNAL),
    ]
    try:
        cfg = load_config(args.config)
        code, records = COMMANDS[args.command](args, cfg)
    except tuple(e for e, _ in errors) as exc:
        code = next(c for e, c in errors if isinstance(exc, e))
        payload = {"type": type(exc).__name__, "message": str(exc), "exit_code": code}
        if isinstance(exc, NotFound):
            payload["reason"] = exc.reason
            payload["diagnostics"] = exc.diagnostics
        records = [OutputRecord("error", payload)]
    _emit(records, args.human, out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
