"""The persuasion function phi: [0,1] -> [0,1] and its assumption checks.

The analysis modules only require the "standard" class (nondecreasing and
concave); the additional "strong" condition phi'(0) < phi(0) is reported
but a failure is not an error, since the linear phi used throughout the
simulations violates it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

__all__ = ["PersuasionFunction", "SsaReport", "parse_phi", "validate_assumptions",
           "PhiSpecError"]

_SIGN_TOL = 1e-8


class PhiSpecError(ValueError):
    pass


@dataclass(frozen=True)
class SsaReport:
    standard: bool
    strong: bool
    range_ok: bool
    first_violation: float | None = None
    detail: str = ""


@dataclass(frozen=True)
class PersuasionFunction:
    """Evaluator plus the textual kind it was built from.

    kind is one of "linear", "constant", "poly", "table"; params carries the
    kind-specific data so the function round-trips through its spec string.
    """

    kind: str
    params: tuple = ()

    def __call__(self, z):
        z = np.asarray(z, dtype=np.float64)
        if self.kind == "linear":
            out = z
        elif self.kind == "constant":
            out = np.full_like(z, self.params[0])
        elif self.kind == "poly":
            out = np.polynomial.polynomial.polyval(z, np.array(self.params))
        elif self.kind == "table":
            xs, ys = self.params
            out = PchipInterpolator(np.array(xs), np.array(ys))(z)
        else:
            raise PhiSpecError(f"unknown kind {self.kind}")
        return out if out.shape else float(out)

    def at_zero(self) -> float:
        return float(self(0.0))

    def table(self, n: int) -> np.ndarray:
        """phi evaluated on the lattice {k/n : k = 0..n} (exact for the
        simulators, which only ever see lattice fractions)."""
        return np.asarray(self(np.arange(n + 1) / n), dtype=np.float64)

    def to_spec(self) -> str:
        if self.kind == "linear":
            return "linear"
        if self.kind == "constant":
            return f"constant:{self.params[0]!r}"
        if self.kind == "poly":
            return "poly:" + ",".join(repr(c) for c in self.params)
        xs, ys = self.params
        return "table:" + ",".join(f"{x!r}:{y!r}" for x, y in zip(xs, ys))


def parse_phi(spec: str) -> PersuasionFunction:
    """Parse "linear", "constant:0.3", "poly:a0,a1,...", "table:z0:v0,...".

    Table knots use monotone (PCHIP) interpolation, which keeps values
    inside the hull of the tabulated ones.
    """
    spec = spec.strip()
    if spec == "linear":
        return PersuasionFunction("linear")
    head, sep, rest = spec.partition(":")
    if not sep:
        raise PhiSpecError(f"cannot parse phi spec {spec!r}")
    try:
        if head == "constant":
            value = float(rest)
            if not 0.0 <= value <= 1.0:
                raise PhiSpecError(f"constant phi must lie in [0, 1], got {value}")
            return PersuasionFunction("constant", (value,))
        if head == "poly":
            return PersuasionFunction("poly", tuple(float(c) for c in rest.split(",")))
        if head == "table":
            knots = [tuple(float(u) for u in item.split(":")) for item in rest.split(",")]
            xs = tuple(x for x, _ in knots)
            ys = tuple(y for _, y in knots)
            if len(xs) < 2 or any(b <= a for a, b in zip(xs, xs[1:])):
                raise PhiSpecError("table knots must be strictly increasing, >= 2 points")
            return PersuasionFunction("table", (xs, ys))
    except PhiSpecError:
        raise
    except ValueError as exc:
        raise PhiSpecError(f"cannot parse phi spec {spec!r}: {exc}") from None
    raise PhiSpecError(f"unknown phi kind {head!r}")


def validate_assumptions(phi: PersuasionFunction, grid_size: int = 1001) -> SsaReport:
    """Finite-difference check of monotonicity, concavity and the strong
    condition phi'(0) < phi(0) on a uniform grid."""
    if grid_size < 3:
        raise ValueError(f"grid_size must be >= 3, got {grid_size}")
    zs = np.linspace(0.0, 1.0, grid_size)
    vals = np.asarray(phi(zs), dtype=np.float64)

    bad = (vals < -_SIGN_TOL) | (vals > 1 + _SIGN_TOL)
    if bad.any():
        w = float(zs[bad][0])
        return SsaReport(standard=False, strong=False, range_ok=False,
                         first_violation=w,
                         detail=f"phi({w}) = {float(phi(w))} outside [0, 1]")

    h = zs[1] - zs[0]
    d1 = np.diff(vals) / h                    # forward differences
    d2 = np.diff(vals, 2) / h ** 2            # central second differences
    standard = True
    witness = None
    detail = ""
    inc_bad = np.nonzero(d1 < -_SIGN_TOL)[0]
    if inc_bad.size:
        standard = False
        witness = float(zs[inc_bad[0]])
        detail = "phi not nondecreasing"
    else:
        conc_bad = np.nonzero(d2 > _SIGN_TOL)[0]
        if conc_bad.size:
            standard = False
            witness = float(zs[conc_bad[0] + 1])
            detail = "phi not concave"
    strong = standard and d1[0] < vals[0] - _SIGN_TOL
    return SsaReport(standard=standard, strong=strong, range_ok=True,
                     first_violation=witness, detail=detail)
