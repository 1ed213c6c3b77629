"""Central finite differences on black-box functions of (x, y).

Stencil points are formed in exact rational arithmetic and handed to the
function as Fractions when it advertises ``exact = True``; only the
difference quotient itself is computed in floating point. This matters for
the counterexample, whose x-oscillations have periods far below one ulp of x.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .cantor import as_fraction
from .errors import ParameterDomainError, StepGeometryError

DEFAULT_LADDER = tuple(Fraction(1, 2**k) for k in range(6, 10))

Rect = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]


@dataclass(frozen=True)
class FunctionHandle:
    func: Callable
    rect: Rect
    tag: str = "external"
    name: str = ""

    @property
    def exact(self) -> bool:
        return getattr(self.func, "exact", False)

    def __call__(self, x, y) -> float:
        if self.exact:
            return self.func(x, y)
        return self.func(float(x), float(y))


# -- built-in controls ---------------------------------------------------------

def _smooth(x, y):
    return math.sin(x) * math.cos(y)


def _abs_x(x, y):
    return abs(x)


def _bilinear(x, y):
    return x * y


def _constant(x, y):
    return 1.0


def _square_x(x, y):
    return x * x


def _identity_x(x, y):
    return x


CONTROL_RECT: Rect = ((Fraction(-2), Fraction(2)), (Fraction(-2), Fraction(2)))

_CONTROLS = {
    "smooth": _smooth,
    "abs-x": _abs_x,
    "bilinear": _bilinear,
    "constant": _constant,
    "square-x": _square_x,
    "x": _identity_x,
}

# analytic partials of the smooth control, for oracles
SMOOTH_PARTIALS = {
    "x": lambda x, y: math.cos(x) * math.cos(y),
    "y": lambda x, y: -math.sin(x) * math.sin(y),
    "xx": lambda x, y: -math.sin(x) * math.cos(y),
    "yy": lambda x, y: -math.sin(x) * math.cos(y),
    "xy": lambda x, y: -math.cos(x) * math.sin(y),
}


def control(name: str, rect: Rect = CONTROL_RECT) -> FunctionHandle:
    try:
        return FunctionHandle(_CONTROLS[name], rect, "control", name)
    except KeyError:
        raise ParameterDomainError(
            f"unknown control {name!r}; choose from {', '.join(sorted(_CONTROLS))}"
        ) from None


def control_names() -> list[str]:
    return sorted(_CONTROLS)


def instance_handle(inst, which: str = "f") -> FunctionHandle:
    from .counterexample import InstanceFunction

    unit = (Fraction(0), Fraction(1))
    return FunctionHandle(InstanceFunction(inst, which), (unit, unit), "instance", f"instance:{which}")


# -- quotients -----------------------------------------------------------------

@dataclass
class QuotientReport:
    point: tuple[Fraction, Fraction]
    which: str
    steps: list[Fraction]
    estimates: list[float]
    extrapolated: float | None
    order: float | None
    reference: float | None = None
    errors: list[float] | None = field(default=None)

    def csv_rows(self) -> list[dict]:
        rows = []
        for i, (h, est) in enumerate(zip(self.steps, self.estimates)):
            rows.append({
                "x": float(self.point[0]),
                "y": float(self.point[1]),
                "which": self.which,
                "step": float(h),
                "estimate": repr(est),
                "error": "" if self.errors is None else repr(self.errors[i]),
            })
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, ["x", "y", "which", "step", "estimate", "error"], lineterminator="\n")
        w.writeheader()
        w.writerows(self.csv_rows())
        return buf.getvalue()


def _steps(steps) -> list[Fraction]:
    hs = [as_fraction(h, "step") for h in steps]
    if not hs or any(h <= 0 for h in hs):
        raise ParameterDomainError("steps must be positive")
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise ParameterDomainError("steps must be strictly decreasing")
    return hs


def _check_stencil(f: FunctionHandle, point, hx: Fraction, hy: Fraction) -> None:
    (x0, x1), (y0, y1) = f.rect
    x, y = point
    if not (x0 <= x - hx and x + hx <= x1 and y0 <= y - hy and y + hy <= y1):
        raise StepGeometryError(
            f"stencil of half-widths ({hx}, {hy}) at ({x}, {y}) leaves the rectangle"
        )


def observed_order(steps: Sequence[Fraction], errors: Sequence[float]) -> float | None:
    """Least-squares slope of log|error| against log h."""
    if len(steps) < 3:
        return None
    e = np.abs(np.asarray(errors, dtype=float))
    if np.any(e == 0) or not np.all(np.isfinite(e)):
        return None
    lh = np.log([float(h) for h in steps])
    return float(np.polyfit(lh, np.log(e), 1)[0])


def _richardson(steps, estimates, p: int = 2) -> float | None:
    if len(estimates) < 2:
        return None
    r = float(steps[-2] / steps[-1])
    rp = r**p
    return (rp * estimates[-1] - estimates[-2]) / (rp - 1)


def _report(point, which, hs, ests, reference) -> QuotientReport:
    errors = None
    order = None
    if reference is not None:
        errors = [e - reference for e in ests]
        order = observed_order(hs, errors)
    elif len(hs) >= 3:
        # successive differences shrink at the same rate as the errors
        diffs = [a - b for a, b in zip(ests, ests[1:])]
        order = observed_order(hs[:-1], diffs)
    return QuotientReport(point, which, hs, ests, _richardson(hs, ests), order, reference, errors)


def fd_partial(f: FunctionHandle, point, which: str, steps=DEFAULT_LADDER, reference: float | None = None) -> QuotientReport:
    """Central differences for which in {x, y, xx, yy}."""
    if which not in ("x", "y", "xx", "yy"):
        raise ParameterDomainError(f"which must be x, y, xx or yy, got {which!r}")
    x, y = as_fraction(point[0], "x"), as_fraction(point[1], "y")
    hs = _steps(steps)
    along_x = which[0] == "x"
    _check_stencil(f, (x, y), hs[0] if along_x else Fraction(0), Fraction(0) if along_x else hs[0])

    def at(d):
        return f(x + d, y) if along_x else f(x, y + d)

    ests = []
    centre = at(Fraction(0)) if len(which) == 2 else None
    for h in hs:
        hf = float(h)
        if len(which) == 1:
            ests.append((at(h) - at(-h)) / (2 * hf))
        else:
            ests.append((at(h) - 2 * centre + at(-h)) / (hf * hf))
    return _report((x, y), which, hs, ests, reference)


def fd_mixed(f: FunctionHandle, point, steps=DEFAULT_LADDER, reference: float | None = None, nesting: str = "symmetric") -> QuotientReport:
    """Second mixed difference.

    ``symmetric`` uses the four-corner stencil with one step h. ``xy``
    differentiates in x with step h/2 inside a y-difference of step h;
    ``yx`` swaps the roles. The nested forms have different truncation
    errors, so their agreement is a real check.
    """
    x, y = as_fraction(point[0], "x"), as_fraction(point[1], "y")
    hs = _steps(steps)
    _check_stencil(f, (x, y), hs[0], hs[0])
    ests = []
    for h in hs:
        hf = float(h)
        if nesting == "symmetric":
            v = f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)
            ests.append(v / (4 * hf * hf))
        elif nesting in ("xy", "yx"):
            inner = h / 2
            ifl = float(inner)

            def dx(yy):
                return (f(x + inner, yy) - f(x - inner, yy)) / (2 * ifl)

            def dy(xx):
                return (f(xx, y + inner) - f(xx, y - inner)) / (2 * ifl)

            if nesting == "xy":
                ests.append((dx(y + h) - dx(y - h)) / (2 * hf))
            else:
                ests.append((dy(x + h) - dy(x - h)) / (2 * hf))
        else:
            raise ParameterDomainError(f"unknown nesting {nesting!r}")
    return _report((x, y), "xy" if nesting == "symmetric" else nesting, hs, ests, reference)


def richardson_error(report: QuotientReport, p: int = 2) -> float:
    """Estimated truncation error of the last estimate under an order-p model."""
    if len(report.estimates) < 2:
        return math.inf
    r = float(report.steps[-2] / report.steps[-1])
    return abs(report.estimates[-1] - report.estimates[-2]) / (r**p - 1)


def interior_steps(inst, point, which: str, ladder=DEFAULT_LADDER) -> list[Fraction]:
    """Rescale a ladder to the local length scale of the counterexample.

    Along y the scale is |I_n| for the interval holding the point, and the
    stencil must stay inside it. Along x it is the oscillation period 1/q_n.
    """
    x, y = as_fraction(point[0], "x"), as_fraction(point[1], "y")
    iv = inst.cantor.containing(y)
    if iv is None:
        raise StepGeometryError(f"y = {y} is in B; no smooth neighbourhood in y")
    if which[0] == "y":
        hs = [h * iv.length for h in ladder]
        if not (iv.a < y - hs[0] and y + hs[0] < iv.b):
            raise StepGeometryError(f"stencil at y = {y} straddles an endpoint of I_{iv.n}")
        return hs
    q = inst.schedule[iv.n].q
    return [h / q for h in ladder]
