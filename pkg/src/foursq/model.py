"""Value types shared by the constructive, oracle and harness layers."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from . import _kernels as K
from .arith import ikroot, is_prime, is_square
from .errors import ConfigError, DomainError, InternalInvariantViolation


class FormId(enum.Enum):
    """The diagonal quaternary (and one ternary) forms that recur throughout."""

    F1111 = "1111"
    F1112 = "1112"
    F1122 = "1122"
    F1113 = "1113"
    F3SQ = "3SQ"

    @property
    def diag(self) -> tuple[int, ...]:
        return _DIAGS[self]

    @property
    def arity(self) -> int:
        return len(_DIAGS[self])

    def evaluate(self, v) -> int:
        d = _DIAGS[self]
        if len(v) != len(d):
            raise DomainError(f"form {self.value} takes {len(d)} coordinates, got {len(v)}")
        return sum(c * x * x for c, x in zip(d, v))

    @classmethod
    def parse(cls, tag) -> "FormId":
        if isinstance(tag, FormId):
            return tag
        try:
            return cls(str(tag).upper())
        except ValueError:
            raise ConfigError(f"unknown form id {tag!r}") from None


_DIAGS = {
    FormId.F1111: (1, 1, 1, 1),
    FormId.F1112: (1, 1, 1, 2),
    FormId.F1122: (1, 1, 2, 2),
    FormId.F1113: (1, 1, 1, 3),
    FormId.F3SQ: (1, 1, 1),
}


@dataclass(frozen=True)
class Target:
    """The set a linear form's value must fall into.

    kind is one of ``prime``, ``prime_power`` (p**k), ``even_power``
    ((2b)**k, b >= 0), ``fixed`` (value == lam) or ``square``.
    """

    kind: str
    k: int = 1
    lam: int | None = None

    KINDS = ("prime", "prime_power", "even_power", "fixed", "square")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ConfigError(f"unknown target kind {self.kind!r}")
        if self.k < 1:
            raise ConfigError("exponent k must be positive")
        if self.kind == "fixed" and self.lam is None:
            raise ConfigError("fixed target needs a value")

    @classmethod
    def prime(cls):
        return cls("prime")

    @classmethod
    def prime_power(cls, k: int):
        return cls("prime_power", k)

    @classmethod
    def even_power(cls, k: int):
        return cls("even_power", k)

    @classmethod
    def fixed(cls, lam: int):
        return cls("fixed", lam=lam)

    @classmethod
    def square(cls):
        return cls("square")

    def certify(self, L: int) -> dict | None:
        """Certificate for ``L`` being in the set, or None."""
        if self.kind == "fixed":
            return {"lambda": L} if L == self.lam else None
        if L < 0:
            return None
        if self.kind == "square":
            return {"root": ikroot(L, 2)} if is_square(L) else None
        if self.kind == "prime":
            return {"p": L, "k": 1} if is_prime(L) else None
        r = ikroot(L, self.k)
        if r**self.k != L:
            return None
        if self.kind == "prime_power":
            return {"p": r, "k": self.k} if is_prime(r) else None
        return {"base": r, "k": self.k} if r % 2 == 0 else None

    def kernel_code(self) -> tuple[int, int]:
        return {
            "prime": (K.PRIME, 1),
            "prime_power": (K.PRIME_POWER, self.k),
            "even_power": (K.EVEN_POWER, self.k),
            "fixed": (K.FIXED, self.lam if self.lam is not None else 0),
            "square": (K.SQUARE, 1),
        }[self.kind]

    def to_json(self) -> dict:
        d = {"kind": self.kind}
        if self.kind in ("prime_power", "even_power"):
            d["k"] = self.k
        if self.kind == "fixed":
            d["lambda"] = self.lam
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Target":
        return cls(d["kind"], d.get("k", 1), d.get("lambda"))


@dataclass(frozen=True)
class LinearConstraint:
    coeffs: tuple[int, ...]
    target: Target

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if not any(self.coeffs):
            raise ConfigError("linear constraint with all-zero coefficients")

    def value(self, v) -> int:
        return sum(a * x for a, x in zip(self.coeffs, v))

    def to_json(self) -> dict:
        return {"coeffs": list(self.coeffs), "target": self.target.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "LinearConstraint":
        return cls(tuple(d["coeffs"]), Target.from_json(d["target"]))


@dataclass(frozen=True)
class Witness:
    """A tuple certifying a representation under a linear restriction.

    ``n`` is the integer actually represented (for example ``n**2`` for the
    squared-target theorem).  ``natural`` records whether the claim is over
    nonnegative integers, in which case every coordinate must be >= 0.
    """

    n: int
    tuple: tuple[int, ...]
    form: FormId
    constraint: LinearConstraint
    certificate: dict = field(default_factory=dict)
    natural: bool = True
    route: str = "construct"

    def problems(self) -> list[str]:
        out = []
        if len(self.tuple) != self.form.arity:
            return [f"tuple {self.tuple} has wrong arity for form {self.form.value}"]
        val = self.form.evaluate(self.tuple)
        if val != self.n:
            out.append(f"form value {val} != {self.n}")
        L = self.constraint.value(self.tuple)
        cert = self.constraint.target.certify(L)
        if cert is None:
            out.append(f"linear value {L} not in target {self.constraint.target.to_json()}")
        elif self.certificate and cert != self.certificate:
            out.append(f"certificate {self.certificate} does not match {cert}")
        if self.natural and any(x < 0 for x in self.tuple):
            out.append(f"negative coordinate in natural witness {self.tuple}")
        return out

    def is_valid(self) -> bool:
        return not self.problems()

    def validate(self) -> "Witness":
        bad = self.problems()
        if bad:
            raise InternalInvariantViolation("; ".join(bad))
        return self

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "tuple": list(self.tuple),
            "form": self.form.value,
            "constraint": self.constraint.to_json(),
            "certificate": dict(self.certificate),
            "natural": self.natural,
            "route": self.route,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Witness":
        return cls(
            d["n"],
            tuple(d["tuple"]),
            FormId.parse(d["form"]),
            LinearConstraint.from_json(d["constraint"]),
            dict(d.get("certificate", {})),
            d.get("natural", True),
            d.get("route", "construct"),
        )


def make_witness(n, v, form, constraint, natural=True, route="construct") -> Witness:
    """Build a witness, deriving its certificate from the tuple, and validate it."""
    v = tuple(int(x) for x in v)
    cert = constraint.target.certify(constraint.value(v)) or {}
    return Witness(int(n), v, form, constraint, cert, natural, route).validate()
