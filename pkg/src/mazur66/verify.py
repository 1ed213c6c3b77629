"""The acceptance checks, runnable from the CLI and from pytest.

Every check returns a :class:`CheckResult`; :func:`run_all` collects them
into a report whose canonical JSON is byte-stable for fixed inputs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .cantor import build_cantor, largest_component, removed_measure_closed_form
from .counterexample import Instance, default_instance, eval_all, mixed_quotient_probe, witness_ladder
from .instance_file import canonical, dumps, loads, rat
from .kernels import (
    condition_eps,
    condition_delta,
    condition_q,
    frac_phase,
    measure_A_n_exact,
    measure_A_n_mc,
    sincos_2pi,
)
from .numdiff import (
    SMOOTH_PARTIALS,
    control,
    fd_mixed,
    fd_partial,
    instance_handle,
    interior_steps,
    richardson_error,
)
from .scanner import ScanConfig, scan
from .variation import check_section_blowup, integrability_report, section_variation, variation_1d

ORDER_RANGE = (1.7, 2.3)
MIXED_TOL = 1e-6
VARIATION_REL_TOL = 0.01
MC_SAMPLES = 100_000
MC_SIGMAS = 3


@dataclass
class CheckResult:
    id: int
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def line(self) -> str:
        return f"[{self.status.upper()}] {self.id}. {self.name}"

    def to_json(self, timings: bool = False) -> dict:
        d = {"id": self.id, "name": self.name, "status": self.status,
             "measured": self.measured, "bounds": self.bounds}
        if timings:
            d["seconds"] = round(self.seconds, 3)
        return d


def check_construction(depths=range(1, 9)) -> CheckResult:
    measured = {}
    ok = True
    for K in depths:
        c = build_cantor(K, 1)
        want = Fraction(1, 2) * (1 - Fraction(1, 2**K))
        exact = c.removed_measure == want == removed_measure_closed_form(K)
        ivs = sorted(c.intervals, key=lambda iv: iv.a)
        disjoint = all(x.b <= y.a for x, y in zip(ivs, ivs[1:]))
        # all pairs as well, not only neighbours
        disjoint = disjoint and all(
            x.b <= y.a or y.b <= x.a for i, x in enumerate(c.intervals) for y in c.intervals[i + 1 :]
        )
        longest = largest_component(c)
        dense = longest < Fraction(4, 2**K)
        ok &= exact and disjoint and dense
        measured[str(K)] = {"removed_measure": rat(c.removed_measure), "disjoint": disjoint,
                            "longest_B_piece": rat(longest), "dense": dense}
    return CheckResult(1, "construction", ok, measured,
                       {"removed_measure": "(1/2)(1-2^-K)", "longest_B_piece": "< 2^(-K+2)"})


def check_schedules(inst: Instance, seed: int = 0) -> CheckResult:
    c51 = condition_eps(inst.cantor, inst.schedule)
    c52 = condition_delta(inst.schedule)
    c53 = condition_q(inst.schedule)
    gens_decrease = all(
        max(r for r, iv in zip(c51["ratios"], inst.cantor.intervals) if iv.g == g)
        < min(r for r, iv in zip(c51["ratios"], inst.cantor.intervals) if iv.g == g - 1)
        for g in range(2, inst.depth + 1)
    )
    mc = {}
    mc_ok = True
    for e in inst.schedule.entries:
        est, _ = measure_A_n_mc(inst.schedule, e.n, MC_SAMPLES, seed)
        p = measure_A_n_exact(inst.schedule, e.n)
        sigma = math.sqrt(p * (1 - p) / MC_SAMPLES)
        z = abs(est - p) / sigma if sigma > 0 else (0.0 if est == p else math.inf)
        mc_ok &= z <= MC_SIGMAS
        mc[str(e.n)] = {"mc": repr(est), "exact": repr(p), "z": round(z, 4)}
    ok = (c51["equals_length"] and c51["nonincreasing"] and gens_decrease
          and c52["tails_exact"] and c53["all"] and mc_ok)
    return CheckResult(2, "schedules", ok, {
        "ratio_equals_length": c51["equals_length"],
        "ratio_nonincreasing": c51["nonincreasing"] and gens_decrease,
        "tails_exact": c52["tails_exact"],
        "arcsin_bound_certified": c53["all"],
        "monte_carlo": mc,
    }, {"monte_carlo_sigmas": MC_SIGMAS, "samples": MC_SAMPLES})


def derivative_points(inst: Instance, count: int = 100, seed: int = 0) -> list[tuple[Fraction, Fraction]]:
    """Points with y well inside some I_n and a non-degenerate x phase.

    t = (y - a_n)/|I_n| lies in [0.2, 0.8] away from 1/2 (where psi' and
    the leading error term of f'_y vanish); |sin| and |cos| of the x phase
    are at least 0.1.
    """
    rng = np.random.default_rng([seed, 3])
    pts = []
    while len(pts) < count:
        n = int(rng.integers(1, inst.N + 1))
        iv = inst.cantor[n]
        t = Fraction(int(rng.integers(int(0.2 * 2**20), int(0.8 * 2**20))), 2**20)
        if abs(t - Fraction(1, 2)) < Fraction(1, 20):
            continue
        x = Fraction(int(rng.integers(int(0.05 * 2**30), int(0.95 * 2**30))), 2**30)
        s, co = sincos_2pi(frac_phase(inst.schedule[n].q, x))
        if min(abs(s), abs(co)) < 0.1:
            continue
        pts.append((x, iv.a + t * iv.length))
    return pts


def check_derivatives(inst: Instance, count: int = 100, seed: int = 0) -> CheckResult:
    h = instance_handle(inst)
    orders = {w: [] for w in ("x", "y", "xx", "yy")}
    for x, y in derivative_points(inst, count, seed):
        ev = eval_all(inst, x, y)
        for w in orders:
            rep = fd_partial(h, (x, y), w, interior_steps(inst, (x, y), w), reference=getattr(ev, "f" + w))
            orders[w].append(rep.order)
    lo, hi = ORDER_RANGE
    ok = all(o is not None and lo <= o <= hi for v in orders.values() for o in v)
    measured = {w: {"min": round(min(v), 6), "max": round(max(v), 6)} for w, v in orders.items()}
    measured["points"] = count
    return CheckResult(3, "derivatives", ok, measured,
                       {"order": list(ORDER_RANGE), "ladder": "2^-6..2^-9 x local scale"})


def check_discontinuity(depth: int = 6, m: int = 3, delta=Fraction(1, 2)) -> CheckResult:
    inst = default_instance(depth)
    y0 = inst.cantor[1].a
    ws = witness_ladder(inst, y0, m, delta)
    rows = mixed_quotient_probe(inst, ws)
    bound = inst.profile.max_value
    dists = [w.distance for w in ws]
    decreasing = all(b < a for a, b in zip(dists, dists[1:]))
    certified = all(w.certified and w.k > m and w.osc + w.osc_err >= bound for w in ws)
    fx0 = eval_all(inst, ws[0].x0, y0).fx
    growth = [rows[i + 1].lower_bound / rows[i].lower_bound for i in range(len(rows) - 1)]
    halved = all(b <= a / 2 for a, b in zip(dists, dists[1:]))
    above = all(abs(r.quotient) >= r.lower_bound for r in rows)
    ok = (len(ws) >= 5 and decreasing and certified and fx0 == 0.0
          and halved and all(g >= 2 for g in growth) and above)
    return CheckResult(4, "discontinuity", ok, {
        "witnesses": [w.to_json() for w in ws],
        "fx_at_y0": repr(fx0),
        "probe": [{"step": rat(r.step), "quotient": repr(r.quotient), "lower_bound": repr(r.lower_bound)}
                  for r in rows],
        "lower_bound_growth": [round(g, 6) for g in growth],
    }, {"witnesses": ">= 5", "osc": rat(bound), "growth_per_halving": ">= 2"})


def check_bounds(inst: Instance, grid: int = 200) -> CheckResult:
    pts = [Fraction(i, grid - 1) for i in range(grid)]
    sup = max(abs(eval_all(inst, x, y).fyy) for y in pts for x in pts)
    const = inst.profile.sup_d2 * inst.cantor[1].length
    rep = integrability_report(inst)
    gens = sorted(rep.increments_pi_coeff)
    inc = [rep.increments_pi_coeff[g] for g in gens]
    part = [rep.partial_sums_pi_coeff[g] for g in gens]
    inc_ok = all(b > a for a, b in zip(inc, inc[1:]))
    part_ok = all(b > a for a, b in zip(part, part[1:]))
    ok = sup <= const and inc_ok and part_ok and rep.sup_fyy_bound == const
    return CheckResult(5, "boundedness_divergence", ok, {
        "sup_fyy_grid": repr(sup),
        "partial_sums": rep.summary()["partial_sums"],
        "increments_increase": inc_ok,
        "partial_sums_increase": part_ok,
    }, {"sup_fyy": rat(const)})


def check_scanner(inst: Instance) -> CheckResult:
    sq = ((Fraction(-1), Fraction(1)), (Fraction(-1), Fraction(1)))
    smooth = scan(control("smooth"), ScanConfig(sq))
    absx = scan(control("abs-x"), ScanConfig(sq))
    nearest = int(np.argmin([abs(x) for x in absx.xs]))
    edge = Fraction(1, 64)
    inner = ((edge, 1 - edge), (edge, 1 - edge))
    fmap = scan(instance_handle(inst), ScanConfig(inner))
    ok = bool(smooth.inE.all()) and absx.excluded_columns() == [nearest] and bool(fmap.inE.all())
    return CheckResult(6, "scanner", ok, {
        "smooth": smooth.summary(), "abs_x": absx.summary(), "instance": fmap.summary(),
    }, {"grid": 64, "m_max": 8, "n_max": 64, "abs_x_excluded": [str(absx.xs[nearest])]})


def check_mixed() -> CheckResult:
    sm = control("smooth")
    worst = 0.0
    nest_ok = True
    for i in range(5):
        for j in range(5):
            x, y = Fraction(1, 5) + Fraction(i, 4), Fraction(-1, 2) + Fraction(j, 4)
            ref = SMOOTH_PARTIALS["xy"](float(x), float(y))
            r = fd_mixed(sm, (x, y), reference=ref)
            worst = max(worst, abs(r.extrapolated - ref))
            rxy = fd_mixed(sm, (x, y), nesting="xy")
            ryx = fd_mixed(sm, (x, y), nesting="yx")
            allowed = richardson_error(rxy) + richardson_error(ryx) + 1e-12
            nest_ok &= abs(rxy.estimates[-1] - ryx.estimates[-1]) <= allowed
    ok = worst <= MIXED_TOL and nest_ok
    return CheckResult(7, "mixed_sanity", ok, {"max_abs_error": repr(worst), "nestings_agree": nest_ok},
                       {"abs_error": MIXED_TOL, "points": 25})


def check_variation(inst: Instance, seed: int = 0) -> CheckResult:
    q, eps = 3, Fraction(1, 64)

    def sinusoid(n):
        t = np.linspace(0.0, 1.0, n)
        return np.column_stack([t, float(eps) / 2 * (1 - np.cos(2 * np.pi * q * t))])

    target = float(2 * eps * q)
    v = variation_1d(sinusoid(20 * q))
    rel = abs(v - target) / target
    sizes = [20 * q]
    for _ in range(4):
        sizes.append(2 * sizes[-1] - 1)
    ladder = [variation_1d(sinusoid(n)) for n in sizes]
    mono = all(b >= a for a, b in zip(ladder, ladder[1:]))

    rng = np.random.default_rng([seed, 8])
    exact_ok = True
    sections = []
    for _ in range(10):
        iv = inst.cantor[int(rng.integers(1, inst.N + 1))]
        t = Fraction(int(rng.integers(1, 2**16)), 2**16)
        got = section_variation(inst, iv.a + t * iv.length).variation
        e = inst.schedule[iv.n]
        want = abs(3 * t**2 * (1 - t) ** 2 * (1 - 2 * t)) / iv.length * 2 * e.eps * e.q
        exact_ok &= got == want
        sections.append({"n": iv.n, "t": rat(t), "var": rat(got)})
    cor = check_section_blowup(inst, 16)
    ok = rel <= VARIATION_REL_TOL and mono and exact_ok
    return CheckResult(8, "variation", ok, {
        "sinusoid_variation": repr(v), "relative_error": repr(rel),
        "refinement_ladder": [repr(x) for x in ladder], "monotone": mono,
        "sections_exact": exact_ok, "sections": sections, "section_blowup": cor.degrades,
    }, {"relative_error": VARIATION_REL_TOL, "target": repr(target)})


def _deterministic_core(inst: Instance, seed: int) -> str:
    ws = witness_ladder(inst, inst.cantor[1].a, 2, Fraction(1, 2))
    mc = [measure_A_n_mc(inst.schedule, n, 20_000, seed) for n in (1, inst.N)]
    pts = derivative_points(inst, 10, seed)
    return canonical({"w": [w.to_json() for w in ws], "mc": [repr(v) for v in mc],
                      "pts": [[rat(x), rat(y)] for x, y in pts]})


def check_persistence(inst: Instance, seed: int = 0) -> CheckResult:
    text = dumps(inst)
    again = dumps(loads(text))
    rt = text == again
    det = _deterministic_core(inst, seed) == _deterministic_core(loads(text), seed)
    return CheckResult(9, "persistence", rt and det, {"round_trip_identical": rt, "deterministic": det},
                       {"round_trip": "byte-identical"})


def run_all(depth: int = 5, seed: int = 0, only: set[int] | None = None) -> list[CheckResult]:
    inst = default_instance(depth)
    checks: list[tuple[int, Callable[[], CheckResult]]] = [
        (1, check_construction),
        (2, lambda: check_schedules(inst, seed)),
        (3, lambda: check_derivatives(inst, seed=seed)),
        (4, check_discontinuity),
        (5, lambda: check_bounds(inst)),
        (6, lambda: check_scanner(inst)),
        (7, check_mixed),
        (8, lambda: check_variation(inst, seed)),
        (9, lambda: check_persistence(inst, seed)),
    ]
    out = []
    for cid, fn in checks:
        if only is not None and cid not in only:
            continue
        t0 = time.perf_counter()
        res = fn()
        res.seconds = time.perf_counter() - t0
        out.append(res)
    return out


def report(results: list[CheckResult], depth: int, seed: int, timings: bool = False) -> dict:
    return {
        "schema_version": 1,
        "config": {"depth": depth, "seed": seed},
        "all_pass": all(r.passed for r in results),
        "checks": [r.to_json(timings) for r in results],
    }
