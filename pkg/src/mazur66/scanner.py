"""Grid surrogate for the existence set of f'_x.

At a point (x, y) and window radius 1/n:

* A_{m,n}: |f(u, y) - f(v, y)| <= 1/m for u, v in (x - 1/n, x + 1/n);
* B_{m,n}: difference quotients Q(u, v) = (f(u, y) - f(v, y)) / (u - v) with
  u in (x, x + 1/n), v in (x - 1/n, x) differ pairwise by at most 1/m.

The universal quantifiers run over ``subsample`` fixed offsets k / (s + 1) of
the half-window on each side, so the tests are necessary conditions only and
the scanned sets over-approximate the true ones. Offsets for s and s' are
nested when (s + 1) divides (s' + 1).
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cantor import as_fraction
from .errors import ParameterDomainError, WindowError
from .numdiff import FunctionHandle, Rect


@dataclass(frozen=True)
class ScanConfig:
    rect: Rect
    nx: int = 64
    ny: int = 64
    m_max: int = 8
    n_max: int = 64
    subsample: int = 4

    def __post_init__(self):
        if min(self.nx, self.ny, self.m_max, self.n_max) < 1:
            raise ParameterDomainError("grid sizes and quantifier caps must be positive")
        if self.subsample < 4:
            raise ParameterDomainError("subsample must be at least 4")

    def xs(self) -> list[Fraction]:
        (x0, x1), _ = self.rect
        return [Fraction(x0) + (Fraction(x1) - Fraction(x0)) * i / self.nx for i in range(self.nx)]

    def ys(self) -> list[Fraction]:
        _, (y0, y1) = self.rect
        return [Fraction(y0) + (Fraction(y1) - Fraction(y0)) * j / self.ny for j in range(self.ny)]


def _offsets(n: int, s: int) -> list[Fraction]:
    return [Fraction(k, (s + 1) * n) for k in range(1, s + 1)]


def _window_ok(f: FunctionHandle, x: Fraction, n: int) -> bool:
    (lo, hi), _ = f.rect
    return lo <= x - Fraction(1, n) and x + Fraction(1, n) <= hi


def _require_window(f, x, n):
    if not _window_ok(f, x, n):
        raise WindowError(f"window ({x} - 1/{n}, {x} + 1/{n}) leaves the domain of {f.name or f.tag}")


def spreads(f: FunctionHandle, x: Fraction, y: Fraction, n: int, s: int) -> tuple[float, float]:
    """(range of f over the window samples, range of the two-sided quotients)."""
    offs = _offsets(n, s)
    right = [f(x + d, y) for d in offs]
    left = [f(x - d, y) for d in offs]
    centre = f(x, y)
    vals = np.array(right + left + [centre])
    q = (np.array(right)[:, None] - np.array(left)[None, :]) / (
        np.array([float(d) for d in offs])[:, None] + np.array([float(d) for d in offs])[None, :]
    )
    return float(vals.max() - vals.min()), float(q.max() - q.min())


def test_A_mn(f: FunctionHandle, point, m: int, n: int, subsample: int = 4) -> bool:
    x, y = as_fraction(point[0], "x"), as_fraction(point[1], "y")
    _require_window(f, x, n)
    return spreads(f, x, y, n, subsample)[0] <= Fraction(1, m)


def test_B_mn(f: FunctionHandle, point, m: int, n: int, subsample: int = 4) -> bool:
    x, y = as_fraction(point[0], "x"), as_fraction(point[1], "y")
    _require_window(f, x, n)
    return spreads(f, x, y, n, subsample)[1] <= Fraction(1, m)


# pytest would otherwise collect the two predicates above
test_A_mn.__test__ = False
test_B_mn.__test__ = False


@dataclass
class ExistenceMap:
    xs: list[Fraction]
    ys: list[Fraction]
    inA: np.ndarray
    inB: np.ndarray

    @property
    def inE(self) -> np.ndarray:
        return self.inA & self.inB

    def excluded_columns(self) -> list[int]:
        return [i for i in range(len(self.xs)) if not self.inE[:, i].all()]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "inA", "inB", "inE"])
        inE = self.inE
        for j, y in enumerate(self.ys):
            for i, x in enumerate(self.xs):
                w.writerow([str(x), str(y), int(self.inA[j, i]), int(self.inB[j, i]), int(inE[j, i])])
        return buf.getvalue()

    def summary(self) -> dict:
        inE = self.inE
        return {
            "excluded_columns": [str(self.xs[i]) for i in self.excluded_columns()],
            "grid": [len(self.xs), len(self.ys)],
            "inA": int(self.inA.sum()),
            "inB": int(self.inB.sum()),
            "inE": int(inE.sum()),
            "points": int(inE.size),
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True, indent=2) + "\n"


def _scan_point(f: FunctionHandle, x, y, cfg: ScanConfig) -> tuple[bool, bool]:
    # membership for all m <= m_max reduces to min over n of the spread <= 1/m_max
    tol = Fraction(1, cfg.m_max)
    a_ok = b_ok = False
    for n in range(1, cfg.n_max + 1):
        if not _window_ok(f, x, n):
            continue
        sa, sb = spreads(f, x, y, n, cfg.subsample)
        a_ok = a_ok or sa <= tol
        b_ok = b_ok or sb <= tol
        if a_ok and b_ok:
            break
    return a_ok, b_ok


def _scan_row(args):
    f, y, cfg = args
    return [_scan_point(f, x, y, cfg) for x in cfg.xs()]


def scan(f: FunctionHandle, cfg: ScanConfig, workers: int = 1) -> ExistenceMap:
    """Classify every grid point; rows are farmed out when ``workers > 1``."""
    xs, ys = cfg.xs(), cfg.ys()
    jobs = [(f, y, cfg) for y in ys]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_row, jobs))
    else:
        rows = [_scan_row(j) for j in jobs]
    arr = np.array(rows, dtype=bool)
    return ExistenceMap(xs, ys, arr[:, :, 0], arr[:, :, 1])
