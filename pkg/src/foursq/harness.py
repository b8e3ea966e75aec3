"""Verification campaigns over ranges of n.

A campaign checks one claim (``target``) for every n in ``[n_lo, n_hi]``.
Work is cut into blocks of 1024 consecutive n; blocks may run in worker
processes, but results are always merged in n-order, so the witness
stream and its digest do not depend on the worker count.

Witness log format (JSON lines, keys in this order):

* header: ``{"kind": "header", "schema_version", "spec_digest", "spec"}``
* witness: ``{"kind": "witness", "target", "params", "n", "tuple", "certificate"}``
* block end: ``{"kind": "block", "lo", "hi", "checked", "passed",
  "not_applicable", "failed"}``

A witness line is only trusted once the block containing it has ended.
Re-running with the same log re-verifies every logged witness and skips
the completed blocks.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import cauchy, constructive, oracle
from .errors import ConfigError, DomainError, FourSqError, LogIntegrityError, NotFound, ResourceLimit
from .model import FormId, LinearConstraint, Target, Witness

SCHEMA_VERSION = 1
BLOCK = 1024
MODES = ("construct", "oracle", "cross")


# ---------------------------------------------------------------------------
# targets


@dataclass(frozen=True)
class TargetDef:
    """How one claim maps onto forms, constraints and algorithms."""

    name: str
    form: FormId
    natural: bool
    params: tuple[str, ...]
    constraint: Callable[[int, dict], LinearConstraint]
    value: Callable[[int, dict], int]
    gate: Callable[[int, dict], str | None]
    construct: Callable[[int, dict], Witness] | None
    defaults: dict = field(default_factory=dict)


def _fixed(coeffs):
    return lambda n, p: LinearConstraint(coeffs, Target.fixed(p["lambda"]))


def _odd_lambda(p):
    lam = p["lambda"]
    if not isinstance(lam, int) or lam < 1 or lam % 2 == 0:
        raise ConfigError(f"lambda must be a positive odd integer, got {lam!r}")


def _gate_thm11(n, p):
    return None if n >= 1 else "n must be positive"


def _gate_thm12iii(n, p):
    lam = p["lambda"]
    if n < 1 or n % 2 == 0:
        return "n must be odd"
    if 14 * n * n < lam * lam:
        return "14n^2 < lambda^2"
    return None


TARGETS: dict[str, TargetDef] = {}


def _register(t: TargetDef):
    TARGETS[t.name] = t


_register(TargetDef(
    "thm1.1", FormId.F1112, True, ("d", "k"),
    lambda n, p: constructive.constraint_thm11(p["d"], p["k"]),
    lambda n, p: n, _gate_thm11,
    lambda n, p: constructive.decompose_thm11(n, p["d"], p["k"]),
    {"d": 1, "k": 1},
))
_register(TargetDef(
    "cor1.2", FormId.F1112, True, (),
    lambda n, p: constructive.CONSTRAINT_COR12,
    lambda n, p: n, lambda n, p: None if n >= 1 else "n must be positive",
    lambda n, p: constructive.decompose_cor12(n),
))
_register(TargetDef(
    "cor1.3i", FormId.F1112, True, (),
    lambda n, p: constructive.CONSTRAINT_COR13I,
    lambda n, p: n, lambda n, p: None if n >= 2 else "n must be >= 2",
    lambda n, p: constructive.decompose_cor13i(n),
))
_register(TargetDef(
    "cor1.3ii", FormId.F1112, True, (),
    lambda n, p: constructive.CONSTRAINT_COR13II,
    lambda n, p: n, lambda n, p: None if n >= 3 else "n must be >= 3",
    lambda n, p: constructive.decompose_cor13ii(n),
))
_register(TargetDef(
    "thm1.2i", FormId.F1112, False, ("lambda",),
    _fixed((1, 1, 2, 2)),
    lambda n, p: n, lambda n, p: None if 8 * n >= p["lambda"] ** 2 else "8n < lambda^2",
    lambda n, p: constructive.decompose_thm12i(n, p["lambda"]),
    {"lambda": 1},
))
_register(TargetDef(
    "thm1.2ii", FormId.F1112, False, ("lambda",),
    _fixed((1, 2, 3, 2)),
    lambda n, p: n, lambda n, p: None if 16 * n >= p["lambda"] ** 2 else "16n < lambda^2",
    lambda n, p: constructive.decompose_thm12ii(n, p["lambda"]),
    {"lambda": 1},
))
_register(TargetDef(
    "thm1.2iii", FormId.F1111, False, ("lambda",),
    _fixed((1, 2, 3, 0)),
    lambda n, p: n * n, _gate_thm12iii,
    lambda n, p: constructive.decompose_thm12iii(n, p["lambda"]),
    {"lambda": 1},
))
_register(TargetDef(
    "thm1.3", FormId.F1112, False, ("lambda", "delta"),
    _fixed((1, 1, 1, 1)),
    lambda n, p: 2 * n + p["delta"],
    lambda n, p: constructive.thm13_applicable(n, p["lambda"], p["delta"]),
    lambda n, p: constructive.decompose_thm13(n, p["lambda"], p["delta"]),
    {"lambda": 1, "delta": 0},
))


def _thm14_form(p):
    return {"i": FormId.F1111, "ii": FormId.F1122, "iii": FormId.F1113}[p["variant"]]


def _thm14_gate(n, p):
    if n < 2:
        return "n must be >= 2"
    v = p["variant"]
    if v == "i" and n % 4 == 0:
        return "variant i needs n odd or n = 2 (mod 4)"
    if v == "ii" and n % 4 == 2:
        return "variant ii needs n odd or 4 | n"
    if not p.get("relaxed", True):
        return cauchy.thm14_strict_gate(n, p["k"], v)
    return None


_register(TargetDef(
    "thm1.4", FormId.F1111, True, ("k", "variant", "relaxed"),
    lambda n, p: cauchy.thm14_constraint(n, p["k"], p["variant"]),
    lambda n, p: n, _thm14_gate,
    lambda n, p: cauchy.decompose_thm14(n, p["k"], p["variant"], p.get("relaxed", True)),
    {"k": 1, "variant": "i", "relaxed": True},
))
_register(TargetDef(
    "conj135", FormId.F1111, True, (),
    lambda n, p: LinearConstraint((1, 3, 5, 0), Target.square()),
    lambda n, p: n, lambda n, p: None if n >= 0 else "n must be >= 0",
    None,
))


def target_form(t: TargetDef, params: dict) -> FormId:
    return _thm14_form(params) if t.name == "thm1.4" else t.form


# ---------------------------------------------------------------------------
# campaigns and results


@dataclass(frozen=True)
class CampaignSpec:
    target: str
    params: dict = field(default_factory=dict)
    n_lo: int = 1
    n_hi: int = 1
    mode: str = "construct"
    workers: int = 1
    witness_log: str | None = None
    parity: str | None = None  # restrict to "odd" or "even" n

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ConfigError(f"unknown target {self.target!r}; known: {', '.join(TARGETS)}")
        t = TARGETS[self.target]
        params = dict(t.defaults)
        for key, val in (self.params or {}).items():
            if key not in t.params:
                raise ConfigError(f"target {self.target} takes no parameter {key!r}")
            params[key] = val
        object.__setattr__(self, "params", params)
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if t.construct is None and self.mode != "oracle":
            raise ConfigError(f"target {self.target} has no construction; use mode 'oracle'")
        if not isinstance(self.n_lo, int) or not isinstance(self.n_hi, int) or self.n_lo > self.n_hi:
            raise ConfigError(f"bad range [{self.n_lo}, {self.n_hi}]")
        if self.n_lo < 0:
            raise ConfigError("n_lo must be >= 0")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError(f"workers must be a positive integer, got {self.workers!r}")
        if self.parity not in (None, "odd", "even"):
            raise ConfigError(f"parity must be odd or even, got {self.parity!r}")
        _validate_params(self.target, params)

    def identity(self) -> dict:
        """The fields that determine the result (not workers or log path)."""
        return {
            "target": self.target,
            "params": self.params,
            "n_lo": self.n_lo,
            "n_hi": self.n_hi,
            "mode": self.mode,
            "parity": self.parity,
        }

    def digest(self) -> str:
        return _sha(json.dumps(self.identity(), sort_keys=True, separators=(",", ":")))

    def to_json(self) -> dict:
        d = self.identity()
        d["workers"] = self.workers
        d["witness_log"] = self.witness_log
        return d

    @classmethod
    def from_json(cls, d: dict) -> "CampaignSpec":
        known = {"target", "params", "n_lo", "n_hi", "mode", "workers", "witness_log", "parity"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown campaign fields: {sorted(extra)}")
        if "target" not in d:
            raise ConfigError("campaign needs a target")
        return cls(**d)


def _validate_params(target, p):
    if target == "thm1.1":
        d, k = p["d"], p["k"]
        if not isinstance(d, int) or d < 1 or not isinstance(k, int) or k < 1:
            raise ConfigError("d and k must be positive integers")
        from .arith import is_prime

        if not is_prime(4 * d * d + 1):
            raise ConfigError(f"4d^2+1 = {4 * d * d + 1} is not prime")
    elif target in ("thm1.2i", "thm1.2ii", "thm1.2iii"):
        _odd_lambda(p)
        if target == "thm1.2iii" and p["lambda"] % 7 == 0:
            raise ConfigError("lambda must not be divisible by 7")
    elif target == "thm1.3":
        lam, delta = p["lambda"], p["delta"]
        if not isinstance(lam, int) or lam % 7 == 0:
            raise ConfigError(f"lambda must be an integer not divisible by 7, got {lam!r}")
        if delta not in (0, 1):
            raise ConfigError(f"delta must be 0 or 1, got {delta!r}")
    elif target == "thm1.4":
        if p["variant"] not in ("i", "ii", "iii"):
            raise ConfigError(f"variant must be i, ii or iii, got {p['variant']!r}")
        if not isinstance(p["k"], int) or p["k"] < 1:
            raise ConfigError("k must be a positive integer")
        if not isinstance(p["relaxed"], bool):
            raise ConfigError("relaxed must be true or false")


@dataclass
class CampaignResult:
    target: str
    params: dict
    n_lo: int
    n_hi: int
    mode: str
    checked: int = 0
    passed: int = 0
    failed: list = field(default_factory=list)  # (n, params, reason)
    not_applicable: int = 0
    duration: float = 0.0
    digest: str = ""
    not_found: int = 0  # failures that are a plain NotFound (ineffective range)

    @property
    def ok(self) -> bool:
        return not self.failed

    @property
    def success_rate(self) -> float | None:
        applicable = self.checked - self.not_applicable
        return self.passed / applicable if applicable else None

    def to_json(self) -> dict:
        d = asdict(self)
        d["failed"] = [{"n": n, "params": p, "reason": r} for n, p, r in self.failed]
        d["success_rate"] = self.success_rate
        return d


def _sha(s: str) -> str:
    return hashlib.sha256(s.encode()).hexdigest()


# ---------------------------------------------------------------------------
# per-block work


def _witness_line(spec_target, params, n, w: Witness) -> dict:
    return {
        "kind": "witness",
        "target": spec_target,
        "params": params,
        "n": n,
        "tuple": list(w.tuple),
        "certificate": w.certificate,
    }


def _dumps(rec: dict) -> str:
    return json.dumps(rec, separators=(",", ":"))


def _oracle_block(t: TargetDef, params, ns):
    """Oracle witnesses (or None) for the applicable n of a block."""
    if not ns:
        return []
    form = target_form(t, params)
    signed = not t.natural
    values = [t.value(n, params) for n in ns]
    if t.name == "thm1.4":
        # the target set depends on the parity of n
        out = []
        for n, v in zip(ns, values):
            out.append(oracle.exists_constrained(v, form, t.constraint(n, params), signed))
        return out
    lc = t.constraint(ns[0], params)
    if signed:
        return [oracle.exists_constrained(v, form, lc, True) for v in values]
    found, rows = oracle.exists_constrained_batch(values, form, lc, order="fast")
    out = []
    for v, f, row in zip(values, found, rows):
        if not f:
            out.append(None)
            continue
        w = Witness(v, tuple(int(x) for x in row[: form.arity]), form, lc, natural=True, route="oracle")
        cert = lc.target.certify(lc.value(w.tuple))
        out.append(Witness(w.n, w.tuple, form, lc, cert or {}, True, "oracle").validate())
    return out


def _construct(t, params, n):
    try:
        return t.construct(n, params), None
    except NotFound as e:
        if e.reason == "no_admissible_candidate":
            return None, "not_applicable"
        return None, f"{e.reason}: {e}"
    except DomainError as e:
        return None, f"domain_error: {e}"
    except FourSqError as e:
        return None, f"{type(e).__name__}: {e}"


def run_block(spec: CampaignSpec, lo: int, hi: int) -> dict:
    """Process ``lo..hi``; returns the block record plus its witness lines."""
    t = TARGETS[spec.target]
    params = spec.params
    lines, failed = [], []
    checked = passed = na = not_found = 0
    todo = []
    for n in range(lo, hi + 1):
        checked += 1
        if spec.parity == "odd" and n % 2 == 0 or spec.parity == "even" and n % 2:
            na += 1
            continue
        if t.gate(n, params) is not None:
            na += 1
            continue
        todo.append(n)
    oracle_w = {}
    if spec.mode in ("oracle", "cross"):
        try:
            oracle_w = dict(zip(todo, _oracle_block(t, params, todo)))
        except ResourceLimit as e:
            for n in todo:
                failed.append((n, params, f"resource_limit: {e}"))
            todo = []
    for n in todo:
        if spec.mode == "oracle":
            w = oracle_w[n]
            if w is None:
                failed.append((n, params, "oracle: no witness"))
            else:
                passed += 1
                lines.append(_witness_line(spec.target, params, n, w))
            continue
        w, why = _construct(t, params, n)
        if why == "not_applicable":
            na += 1
            continue
        if w is not None and not w.is_valid():
            w, why = None, "invalid witness: " + "; ".join(w.problems())
        if spec.mode == "cross":
            exists = oracle_w[n] is not None
            if w is not None and not exists:
                failed.append((n, params, "construct succeeded where the oracle found nothing"))
                continue
            if w is None and exists:
                if why.startswith("not_found"):
                    not_found += 1
                failed.append((n, params, f"oracle found a witness; construct failed ({why})"))
                continue
            if w is None:
                failed.append((n, params, f"neither engine found a witness ({why})"))
                continue
        elif w is None:
            if why.startswith("not_found"):
                not_found += 1
            failed.append((n, params, why))
            continue
        passed += 1
        lines.append(_witness_line(spec.target, params, n, w))
    block = {
        "kind": "block",
        "lo": lo,
        "hi": hi,
        "checked": checked,
        "passed": passed,
        "not_applicable": na,
        "failed": [{"n": n, "reason": r} for n, _, r in failed],
        "not_found": not_found,
    }
    return {"lines": lines, "block": block}


def _run_block_args(args):
    return run_block(*args)


# ---------------------------------------------------------------------------
# log


def verify_witness_line(rec: dict) -> Witness:
    """Rebuild and re-validate a logged witness."""
    try:
        t = TARGETS[rec["target"]]
        params = rec["params"]
        n = rec["n"]
        form = target_form(t, params)
        lc = t.constraint(n, params)
        w = Witness(t.value(n, params), tuple(rec["tuple"]), form, lc, dict(rec["certificate"]), t.natural)
    except (KeyError, TypeError, ValueError) as e:
        raise LogIntegrityError(f"malformed witness record {rec}: {e}") from None
    bad = w.problems()
    if not rec["certificate"] and lc.target.certify(lc.value(w.tuple)):
        bad.append("missing certificate")
    if bad:
        raise LogIntegrityError(f"logged witness for n={n} fails verification: {'; '.join(bad)}")
    return w


def read_log(path: str) -> tuple[dict, list[dict], list[dict]]:
    """Parse a log into (header, completed blocks, their witness lines).

    Every witness line of a completed block is re-verified; a trailing
    partial block is dropped."""
    header = None
    blocks, done_lines, pending = [], [], []
    with open(path, encoding="utf-8") as fh:
        for i, raw in enumerate(fh, 1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError:
                # a torn final line from an interrupted run
                break
            kind = rec.get("kind")
            if i == 1 or header is None:
                if kind != "header":
                    raise LogIntegrityError(f"{path}: first record is not a header")
                if rec.get("schema_version") != SCHEMA_VERSION:
                    raise LogIntegrityError(f"{path}: unsupported schema version {rec.get('schema_version')}")
                header = rec
                continue
            if kind == "witness":
                pending.append(rec)
            elif kind == "block":
                for w in pending:
                    if not rec["lo"] <= w["n"] <= rec["hi"]:
                        raise LogIntegrityError(f"{path}: witness n={w['n']} outside block {rec['lo']}..{rec['hi']}")
                    verify_witness_line(w)
                if len(pending) != rec["passed"]:
                    raise LogIntegrityError(f"{path}: block {rec['lo']}..{rec['hi']} lists {rec['passed']} passes but has {len(pending)} witnesses")
                done_lines.extend(pending)
                pending = []
                blocks.append(rec)
            else:
                raise LogIntegrityError(f"{path}: unknown record kind {kind!r} on line {i}")
    if header is None:
        raise LogIntegrityError(f"{path}: empty log")
    return header, blocks, done_lines


def _write_log(path, header, blocks, lines):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dumps(header) + "\n")
        by_block = iter(lines)
        pending = next(by_block, None)
        for b in blocks:
            while pending is not None and pending["n"] <= b["hi"]:
                fh.write(_dumps(pending) + "\n")
                pending = next(by_block, None)
            fh.write(_dumps(b) + "\n")


# ---------------------------------------------------------------------------
# driver


def _blocks(spec: CampaignSpec):
    lo = spec.n_lo
    while lo <= spec.n_hi:
        hi = min(lo + BLOCK - 1, spec.n_hi)
        yield lo, hi
        lo = hi + 1


def run(spec: CampaignSpec) -> CampaignResult:
    """Run a campaign, resuming from ``spec.witness_log`` when it matches."""
    start = time.perf_counter()
    header = {"kind": "header", "schema_version": SCHEMA_VERSION, "spec_digest": spec.digest(), "spec": spec.identity()}
    done = {}
    if spec.witness_log and os.path.exists(spec.witness_log) and os.path.getsize(spec.witness_log) > 0:
        old_header, done_blocks, done_lines = read_log(spec.witness_log)
        if old_header.get("spec_digest") != header["spec_digest"]:
            raise LogIntegrityError(
                f"{spec.witness_log} belongs to a different campaign (digest {old_header.get('spec_digest')})"
            )
        # rewrite without any torn tail so appends start at a block boundary
        _write_log(spec.witness_log, header, done_blocks, done_lines)
        done = {b["lo"]: {"block": b, "lines": []} for b in done_blocks}
        for w in done_lines:
            lo = spec.n_lo + (w["n"] - spec.n_lo) // BLOCK * BLOCK
            done[lo]["lines"].append(w)
    elif spec.witness_log:
        _write_log(spec.witness_log, header, [], [])
    order = list(_blocks(spec))
    todo = [b for b in order if b[0] not in done]
    fresh = _execute(spec, todo)

    result = CampaignResult(spec.target, spec.params, spec.n_lo, spec.n_hi, spec.mode)
    h = hashlib.sha256()
    log = open(spec.witness_log, "a", encoding="utf-8") if spec.witness_log else None
    try:
        for lo, hi in order:
            if lo in done:
                res = done.pop(lo)
            else:
                key, res = next(fresh)
                assert key == (lo, hi)
                if log:
                    for line in res["lines"]:
                        log.write(_dumps(line) + "\n")
                    log.write(_dumps(res["block"]) + "\n")
                    log.flush()
            b = res["block"]
            result.checked += b["checked"]
            result.passed += b["passed"]
            result.not_applicable += b["not_applicable"]
            result.not_found += b.get("not_found", 0)
            result.failed.extend((f["n"], spec.params, f["reason"]) for f in b["failed"])
            for line in res["lines"]:
                h.update((_dumps(line) + "\n").encode())
    finally:
        fresh.close()
        if log:
            log.close()
    result.digest = h.hexdigest()
    result.duration = time.perf_counter() - start
    return result


def _execute(spec, todo):
    """Yield (block key, result) in block order."""
    if spec.workers == 1 or len(todo) <= 1:
        for lo, hi in todo:
            yield (lo, hi), run_block(spec, lo, hi)
        return
    ctx = multiprocessing.get_context("fork") if "fork" in multiprocessing.get_all_start_methods() else None
    with ProcessPoolExecutor(max_workers=spec.workers, mp_context=ctx) as ex:
        args = [(spec, lo, hi) for lo, hi in todo]
        for (lo, hi), res in zip(todo, ex.map(_run_block_args, args, chunksize=1)):
            yield (lo, hi), res


def check_135(n_max: int, workers: int = 1, witness_log: str | None = None) -> CampaignResult:
    """Every 0 <= n <= n_max as x^2+y^2+z^2+w^2 (naturals) with x+3y+5z a square."""
    if not isinstance(n_max, int) or n_max < 0:
        raise ConfigError(f"n_max must be a nonnegative integer, got {n_max!r}")
    if n_max > 10**7:
        raise ResourceLimit(f"n_max = {n_max} exceeds the desk-scale cap 10^7")
    return run(CampaignSpec("conj135", {}, 0, n_max, "oracle", workers, witness_log))


# ---------------------------------------------------------------------------
# conjecture exploration

EXPLORE_CELLS = 2 * 10**8


def explore_conjecture(coeffs, f: FormId, n_max: int, n_min: int = 1, values: bool = False) -> dict:
    """Linear values achievable over signed decompositions, and a greedy
    hitting set of naturals covering every n in ``[n_min, n_max]``.

    The report is empirical; ``growth[i]`` is the number of n covered by
    the first i+1 chosen values."""
    f = FormId.parse(f)
    coeffs = tuple(int(c) for c in coeffs)
    if len(coeffs) != f.arity:
        raise ConfigError(f"form {f.value} needs {f.arity} coefficients, got {len(coeffs)}")
    if not any(coeffs):
        raise ConfigError("coefficients must not all be zero")
    if n_max < 0 or n_min < 0 or n_min > n_max:
        raise ConfigError(f"bad range [{n_min}, {n_max}]")
    lc = LinearConstraint(coeffs, Target.square())  # only the coefficients are used
    L = oracle.max_linear(n_max, f, lc)
    cells = (n_max + 1) * (2 * L + 1)
    if cells > EXPLORE_CELLS:
        raise ResourceLimit(f"value table would need {cells} cells (cap {EXPLORE_CELLS})")
    if n_max > oracle.MAX_N:
        raise ResourceLimit(f"n_max exceeds {oracle.MAX_N}")
    table = np.zeros((n_max + 1, 2 * L + 1), np.uint8)
    a = np.zeros(4, np.int64)
    a[: f.arity] = coeffs
    from . import _kernels as K

    K.oracle_linear_values(oracle._diag4(f.diag), f.arity, a, n_max, L, table)
    nat = table[n_min:, L:].astype(bool)  # columns are the values 0..L
    uncovered = np.ones(nat.shape[0], bool)
    never = ~nat.any(axis=1)
    uncovered &= ~never
    chosen, growth = [], []
    covered = 0
    while uncovered.any():
        gains = nat[uncovered].sum(axis=0)
        best = int(np.argmax(gains))
        if gains[best] == 0:
            break
        chosen.append(best)
        hit = nat[:, best] & uncovered
        covered += int(hit.sum())
        uncovered &= ~hit
        growth.append(covered)
    report = {
        "coeffs": list(coeffs),
        "form": f.value,
        "n_min": n_min,
        "n_max": n_max,
        "hitting_set": chosen,
        "growth": growth,
        "no_natural_value": [int(n_min + i) for i in np.flatnonzero(never)],
    }
    if values:
        report["values"] = {
            str(n_min + i): [int(v) for v in np.flatnonzero(row)] for i, row in enumerate(nat)
        }
    return report
