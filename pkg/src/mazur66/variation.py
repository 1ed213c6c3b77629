"""Tonelli variation on grids, plus the closed-form diagnostics for f.

Sampled variation is the variation of the piecewise-linear interpolant and
is always a lower bound for the true variation. Closed forms are used
wherever a section lies inside one removed interval.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cantor import as_fraction
from .counterexample import Instance
from .errors import Mazur66Error, ParameterDomainError
from .kernels import bump_eval
from .numdiff import FunctionHandle


def variation_1d(samples) -> float:
    """Sum of |v[i+1] - v[i]| over samples ordered by strictly increasing t.

    ``samples`` is a sequence of (t, value) pairs or a 2-row array.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or 2 not in arr.shape:
        raise ParameterDomainError("samples must be (t, value) pairs")
    t, v = (arr[:, 0], arr[:, 1]) if arr.shape[1] == 2 else (arr[0], arr[1])
    if len(t) < 2:
        return 0.0
    if np.any(np.diff(t) <= 0):
        raise ParameterDomainError("sample abscissae must be strictly increasing")
    return float(np.abs(np.diff(v)).sum())


@dataclass
class VariationProfile:
    axis: int
    coords: np.ndarray
    values: np.ndarray
    integral: float
    lower_bound: bool = True

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", f"V{self.axis}"])
        for c, v in zip(self.coords, self.values):
            w.writerow([repr(float(c)), repr(float(v))])
        return buf.getvalue()


class SectionError(Mazur66Error):
    pass


def _grid(lo, hi, n) -> list[Fraction]:
    lo, hi = Fraction(lo), Fraction(hi)
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def tonelli_profile(f: FunctionHandle, rect=None, grid_nx: int = 65, grid_ny: int = 65) -> tuple[VariationProfile, VariationProfile]:
    """(V1 over x-sections, V2 over y-sections) with trapezoidal integrals.

    V1(x) is the sampled variation of y -> f(x, y); V2(y) that of x -> f(x, y).
    """
    if grid_nx < 2 or grid_ny < 2:
        raise ParameterDomainError("grids need at least 2 points per axis")
    (x0, x1), (y0, y1) = rect if rect is not None else f.rect
    xs, ys = _grid(x0, x1, grid_nx), _grid(y0, y1, grid_ny)
    vals = np.empty((grid_nx, grid_ny))
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            try:
                vals[i, j] = f(x, y)
            except Mazur66Error as exc:
                raise SectionError(f"evaluation failed at section x = {x}, y = {y}: {exc}") from exc
    xf = np.array([float(x) for x in xs])
    yf = np.array([float(y) for y in ys])
    v1 = np.abs(np.diff(vals, axis=1)).sum(axis=1)
    v2 = np.abs(np.diff(vals, axis=0)).sum(axis=0)
    return (
        VariationProfile(1, xf, v1, float(np.trapezoid(v1, xf))),
        VariationProfile(2, yf, v2, float(np.trapezoid(v2, yf))),
    )


@dataclass(frozen=True)
class Section:
    y: Fraction
    n: int | None
    variation: Fraction | float


@dataclass
class SectionBlowupReport:
    sections: list[Section]
    quarter_point: dict[int, Fraction | float]
    generation_max: dict[int, Fraction | float]
    degrades: bool


def section_variation(inst: Instance, y) -> Section:
    """Exact Var_x of F_y(x) = f'_y(x, y) over [0, 1].

    For y in I_n, F_y = phi_n(x) psi_n'(y) and Var(phi_n) = 2 eps_n q_n.
    """
    y = as_fraction(y, "y")
    iv = inst.cantor.containing(y)
    if iv is None:
        return Section(y, None, Fraction(0))
    e = inst.schedule[iv.n]
    d = bump_eval(inst.profile, (y - iv.a) / iv.length, 1)
    return Section(y, iv.n, abs(d) / iv.length * 2 * e.eps * e.q)


def check_section_blowup(inst: Instance, grid: Iterable | int = 64) -> SectionBlowupReport:
    """Section variations of f'_y in x, and whether they blow up with n.

    ``grid`` is a list of y values or a count of equally spaced sections.
    The quarter-point values |psi'(1/4)| / |I_n| * 2 eps_n q_n are reported
    per index; ``degrades`` is True when their generation maxima increase,
    which is how the finite-variation hypothesis fails for this f.
    """
    ys = _grid(0, 1, grid) if isinstance(grid, int) else list(grid)
    sections = [section_variation(inst, y) for y in ys]
    quarter = {}
    for iv in inst.cantor.intervals:
        quarter[iv.n] = section_variation(inst, iv.a + iv.length / 4).variation
    gmax = {}
    for iv in inst.cantor.intervals:
        gmax[iv.g] = max(gmax.get(iv.g, 0), quarter[iv.n])
    gens = sorted(gmax)
    degrades = all(gmax[b] > gmax[a] for a, b in zip(gens, gens[1:])) and len(gens) > 1
    return SectionBlowupReport(sections, quarter, gmax, degrades)


@dataclass
class IntegrabilityReport:
    """Closed-form integrals of |f''_xx| and the sup bound for |f''_yy|.

    Integrals are stored as rational multiples of pi: the n-th term is
    int|phi_n''| * int psi_n = 4 pi eps_n q_n^2 * |I_n| int_0^1 psi.
    """

    term_pi_coeff: dict[int, Fraction]
    increments_pi_coeff: dict[int, Fraction]
    partial_sums_pi_coeff: dict[int, Fraction]
    psi_integral: Fraction | float
    sup_fyy_bound: Fraction | float

    def summary(self) -> dict:
        return {
            "increments": {str(g): repr(float(v) * np.pi) for g, v in self.increments_pi_coeff.items()},
            "increments_pi_coeff": {str(g): str(v) for g, v in self.increments_pi_coeff.items()},
            "partial_sums": {str(g): repr(float(v) * np.pi) for g, v in self.partial_sums_pi_coeff.items()},
            "partial_sums_pi_coeff": {str(g): str(v) for g, v in self.partial_sums_pi_coeff.items()},
            "psi_integral": str(self.psi_integral),
            "sup_fyy_bound": str(self.sup_fyy_bound),
        }


def integrability_report(inst: Instance) -> IntegrabilityReport:
    p = inst.profile
    psi_int = p.integral
    terms, inc = {}, {}
    ratio_max = Fraction(0)
    for iv, e in zip(inst.cantor.intervals, inst.schedule.entries):
        # int_0^1 |phi''| = (eps omega^2 / 2) * (2 / pi) = 4 pi eps q^2
        coeff = 4 * e.eps * e.q * e.q * iv.length * psi_int
        terms[iv.n] = coeff
        inc[iv.g] = inc.get(iv.g, 0) + coeff
        ratio_max = max(ratio_max, e.eps / iv.length**2)
    partial, acc = {}, 0
    for g in sorted(inc):
        acc += inc[g]
        partial[g] = acc
    sup_yy = p.sup_d2 * ratio_max
    return IntegrabilityReport(terms, inc, partial, psi_int, sup_yy)


def section_rows(sections: Sequence[Section]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["y", "n", "var_x_fy"])
    for s in sections:
        w.writerow([str(s.y), "" if s.n is None else s.n, repr(float(s.variation))])
    return buf.getvalue()
