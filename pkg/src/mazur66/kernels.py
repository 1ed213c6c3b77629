"""Bump profile, oscillators and the schedules eps_n, delta_n, q_n.

The n-th term of the counterexample is ``phi_n(x) * psi_n(y)`` with

* ``psi_n(y) = psi((y - a_n) / |I_n|)`` for a C^2 bump ``psi`` supported on (0, 1);
* ``phi_n(x) = (eps_n / 2)(1 - cos(2 pi q_n x))`` with integer ``q_n``.

``q_n`` is the least integer with ``pi eps_n q_n sin(pi delta_n / 2) > 1``.
Then ``|phi_n'(x)| >= 1`` off a set of measure ``(2/pi) arcsin(c_n) < delta_n``,
where ``c_n = 1 / (pi eps_n q_n)``.

Phases are reduced exactly: at ``x = p/r`` the fractional part of ``q_n x`` is
``(q_n p mod r) / r``, computed with Python integers before any float is
formed, so rounding errors do not grow with ``q_n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from . import certified
from .cantor import CantorSet, Interval, as_fraction
from .certified import iv, to_iv
from .errors import ParameterDomainError, ScheduleViolationError, SearchExhaustedError

# Bound on |computed - true| for sin/cos of 2*pi*r, r in [0, 1/4], evaluated in
# binary64: argument error < 2**-50 plus one ulp from libm.
TRIG_ERR = 2.0**-49
# Extra slack for forming the float scale factor (eps, q, pi products).
SCALE_REL = 2.0**-50

MC_PRIME = 4294967291  # largest prime below 2**32


# -- bump profiles -----------------------------------------------------------

def _poly3(t, order):
    u = t * (1 - t)
    if order == 0:
        return u * u * u
    if order == 1:
        return 3 * u * u * (1 - 2 * t)
    return 6 * u * (1 - 2 * t) ** 2 - 6 * u * u


def _smooth_exp(t, order):
    t = float(t)
    u = t * (1 - t)
    v = math.exp(-1 / u)
    du = 1 - 2 * t
    if order == 0:
        return v
    if order == 1:
        return v * du / u**2
    return v * (du**2 / u**4 + (-2 * u - 2 * du**2) / u**3)


@dataclass(frozen=True)
class BumpProfile:
    id: str
    max_value: Fraction | float
    argmax: Fraction
    integral: Fraction | float
    sup_d1: float
    sup_d2: Fraction | float
    exact: bool

    def __call__(self, t, order: int = 0):
        return bump_eval(self, t, order)

    def constants(self) -> dict:
        return {
            "argmax": self.argmax,
            "integral": self.integral,
            "max": self.max_value,
            "sup_d1": self.sup_d1,
            "sup_d2": self.sup_d2,
        }


def _exp_profile() -> BumpProfile:
    ts = np.linspace(1e-3, 1 - 1e-3, 200_001)
    d1 = max(abs(_smooth_exp(t, 1)) for t in ts[::50])
    d2 = max(abs(_smooth_exp(t, 2)) for t in ts[::50])
    integral = float(mpmath.quad(lambda t: mpmath.exp(-1 / (t * (1 - t))), [0, 0.5, 1]))
    return BumpProfile("exp", math.exp(-4), Fraction(1, 2), integral, d1, d2, exact=False)


POLY3 = BumpProfile(
    id="poly3",
    max_value=Fraction(1, 64),
    argmax=Fraction(1, 2),
    integral=Fraction(1, 140),
    # attained where (1 - 2t)**2 = 1/5
    sup_d1=3 * math.sqrt(5) / 125,
    sup_d2=Fraction(3, 8),
    exact=True,
)

_PROFILES: dict[str, Callable[[], BumpProfile]] = {"poly3": lambda: POLY3, "exp": _exp_profile}


def get_profile(profile_id: str = "poly3") -> BumpProfile:
    try:
        return _PROFILES[profile_id]()
    except KeyError:
        raise ParameterDomainError(f"unknown bump profile {profile_id!r}") from None


def bump_eval(profile: BumpProfile, t, order: int = 0):
    """psi^(order)(t); exact for rational ``t`` with the polynomial profile."""
    if order not in (0, 1, 2):
        raise ParameterDomainError(f"order must be 0, 1 or 2, got {order!r}")
    if t <= 0 or t >= 1:
        return Fraction(0) if profile.exact and not isinstance(t, float) else 0.0
    if profile.id == "poly3":
        return _poly3(t, order)
    return _smooth_exp(t, order)


# -- schedules ---------------------------------------------------------------

@dataclass(frozen=True)
class ScheduleEntry:
    n: int
    eps: Fraction
    delta: Fraction
    q: int

    @property
    def omega(self) -> float:
        return 2 * math.pi * self.q

    @property
    def c(self) -> float:
        """Threshold on |sin| defining A_n (float, for reporting)."""
        return 1 / (math.pi * float(self.eps * self.q))


@dataclass(frozen=True)
class KernelSchedule:
    entries: tuple[ScheduleEntry, ...]
    eps_rule: str = "cube"
    delta_rule: str = "pair"

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, n: int) -> ScheduleEntry:
        if not 1 <= n <= len(self.entries):
            raise ParameterDomainError(f"schedule index {n} outside 1..{len(self.entries)}")
        return self.entries[n - 1]


EPS_RULES = {"cube": lambda iv: iv.length**3}
DELTA_RULES = {"pair": lambda iv: Fraction(1, iv.n * (iv.n + 1))}


def _resolve(rule, table: dict, intervals: Sequence[Interval], what: str):
    if isinstance(rule, str):
        if rule not in table:
            raise ParameterDomainError(f"unknown {what} rule {rule!r}")
        return rule, [table[rule](iv) for iv in intervals]
    if callable(rule):
        return "table", [as_fraction(rule(iv), what) for iv in intervals]
    values = [as_fraction(v, what) for v in rule]
    if len(values) != len(intervals):
        raise ScheduleViolationError(
            f"{what} table has {len(values)} entries, the set has {len(intervals)} intervals"
        )
    return "table", values


def smallest_q(eps: Fraction, delta: Fraction) -> int:
    """Least integer q with q > 1 / (pi eps sin(pi delta / 2)), certified."""
    t = certified.floor_of(lambda: 1 / (iv.pi * to_iv(eps) * iv.sin(iv.pi * to_iv(delta) / 2)))
    return t + 1


def validate_tables(c: CantorSet, eps: Sequence[Fraction], delta: Sequence[Fraction]) -> None:
    if any(e <= 0 for e in eps):
        raise ScheduleViolationError("eps_n must be positive")
    if any(not 0 < d < 1 for d in delta):
        raise ScheduleViolationError("delta_n must lie in (0, 1)")
    # finite surrogate for convergence of sum delta_n: total mass at most 1
    if sum(delta, Fraction(0)) > 1:
        raise ScheduleViolationError(f"sum of delta_n is {sum(delta)} > 1")
    ratios = [e / iv.length**2 for e, iv in zip(eps, c.intervals)]
    if any(r2 > r1 for r1, r2 in zip(ratios, ratios[1:])):
        raise ScheduleViolationError("eps_n / |I_n|^2 must be nonincreasing in n")
    for g in range(2, c.depth + 1):
        prev = ratios[2 ** (g - 2) - 1 : 2 ** (g - 1) - 1]
        cur = ratios[2 ** (g - 1) - 1 : 2**g - 1]
        if max(cur) >= min(prev):
            raise ScheduleViolationError(
                f"eps_n / |I_n|^2 does not decrease from generation {g - 1} to {g}"
            )


def make_schedule(c: CantorSet, eps_rule="cube", delta_rule="pair") -> KernelSchedule:
    """Build eps_n, delta_n and q_n for every interval of ``c``.

    Rules are a registered name, a callable ``Interval -> rational`` or a
    table with one rational per interval.
    """
    eps_id, eps = _resolve(eps_rule, EPS_RULES, c.intervals, "eps")
    delta_id, delta = _resolve(delta_rule, DELTA_RULES, c.intervals, "delta")
    validate_tables(c, eps, delta)
    entries = tuple(
        ScheduleEntry(iv.n, e, d, smallest_q(e, d))
        for iv, e, d in zip(c.intervals, eps, delta)
    )
    return KernelSchedule(entries, eps_id, delta_id)


# -- oscillators -------------------------------------------------------------

def frac_phase(q: int, x: Fraction) -> Fraction:
    """Fractional part of q * x, exact."""
    return Fraction(q * x.numerator % x.denominator, x.denominator)


def _quadrant(f: Fraction) -> tuple[int, Fraction]:
    j = math.floor(4 * f)
    return j, f - Fraction(j, 4)


def sincos_2pi(f: Fraction) -> tuple[float, float]:
    """(sin 2 pi f, cos 2 pi f) for f in [0, 1) with error below TRIG_ERR.

    The quadrant is split off exactly, so quarter-turn phases give exact
    0 and +-1.
    """
    j, r = _quadrant(f)
    a = 2 * math.pi * float(r)
    s, co = math.sin(a), math.cos(a)
    return ((s, co), (co, -s), (-s, -co), (-co, s))[j]


@dataclass(frozen=True)
class OscillatorEval:
    value: float
    d1: float
    d2: float
    value_err: float
    d1_err: float
    d2_err: float


def _check_x(x) -> Fraction:
    x = as_fraction(x, "x")
    if not 0 <= x <= 1:
        raise ParameterDomainError(f"x must lie in [0, 1], got {x}")
    return x


def phi_eval(s: KernelSchedule, n: int, x) -> OscillatorEval:
    e = s[n]
    x = _check_x(x)
    f = frac_phase(e.q, x)
    sn, cs = sincos_2pi(f)
    half = f if f <= Fraction(1, 2) else 1 - f
    sh = math.sin(math.pi * float(half))
    eps = float(e.eps)
    s1 = float(e.eps * e.q) * math.pi
    s2 = float(e.eps * e.q * e.q) * 2 * math.pi**2
    return OscillatorEval(
        value=eps * sh * sh,
        d1=s1 * sn,
        d2=s2 * cs,
        value_err=eps * 4 * TRIG_ERR,
        d1_err=s1 * (TRIG_ERR + SCALE_REL),
        d2_err=s2 * (TRIG_ERR + SCALE_REL),
    )


def _certify_A(e: ScheduleEntry, f: Fraction) -> bool:
    j, r = _quadrant(f)
    if r == 0 and j % 2 == 0:
        return False  # sin = 0
    trig = iv.cos if j % 2 else iv.sin

    def margin():
        return iv.pi * to_iv(e.eps) * to_iv(e.q) * trig(2 * iv.pi * to_iv(r)) - 1

    return certified.sign(margin) > 0


def in_A_n(s: KernelSchedule, n: int, x) -> bool:
    """Certified test of |phi_n'(x)| >= 1."""
    e = s[n]
    x = _check_x(x)
    f = frac_phase(e.q, x)
    sn, _ = sincos_2pi(f)
    s1 = float(e.eps * e.q) * math.pi
    p, err = s1 * abs(sn), s1 * (TRIG_ERR + SCALE_REL) + 2.0**-50
    if p - err > 1:
        return True
    if p + err < 1:
        return False
    return _certify_A(e, f)


def find_point_in_tail(s: KernelSchedule, m: int, n_max: int, budget: int = 1 << 16) -> Fraction:
    """First dyadic j / 2**k (by level, then j) lying in A_n for m <= n <= n_max."""
    if not 1 <= m <= n_max <= len(s):
        raise ParameterDomainError(f"need 1 <= m <= n_max <= {len(s)}, got m={m}, n_max={n_max}")
    tried = 0
    level = 1
    while True:
        den = 2**level
        for j in range(1, den, 2):
            x = Fraction(j, den)
            if all(in_A_n(s, n, x) for n in range(m, n_max + 1)):
                return x
            tried += 1
            if tried >= budget:
                raise SearchExhaustedError(
                    f"no point of A_{m} .. A_{n_max} among {tried} dyadic candidates"
                )
        level += 1


def measure_A_n_exact(s: KernelSchedule, n: int) -> float:
    """1 - (2/pi) arcsin(c_n), evaluated at 80 digits."""
    e = s[n]
    with mpmath.workdps(80):
        c = 1 / (mpmath.pi * mpmath.mpf(e.eps.numerator) / e.eps.denominator * e.q)
        return float(1 - 2 / mpmath.pi * mpmath.asin(c))


def measure_A_n_mc(s: KernelSchedule, n: int, samples: int = 100_000, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate of mu(A_n) and its standard error.

    Samples x = k / P uniformly with P prime, so q_n x mod 1 is computed
    exactly in uint64 arithmetic. The stream depends only on (seed, n).
    """
    e = s[n]
    rng = np.random.default_rng([seed, n])
    k = rng.integers(0, MC_PRIME, size=samples, dtype=np.uint64)
    qm = np.uint64(e.q % MC_PRIME)
    phase = (k * qm) % np.uint64(MC_PRIME)
    sn = np.abs(np.sin(2 * np.pi * (phase.astype(np.float64) / MC_PRIME)))
    hits = sn >= e.c
    p = hits.mean()
    return float(p), float(math.sqrt(p * (1 - p) / samples))


# -- certificates for the three schedule conditions ---------------------------

def condition_eps(c: CantorSet, s: KernelSchedule) -> dict:
    ratios = [e.eps / iv.length**2 for e, iv in zip(s.entries, c.intervals)]
    return {
        "ratios": ratios,
        "nonincreasing": all(b <= a for a, b in zip(ratios, ratios[1:])),
        "equals_length": all(r == iv.length for r, iv in zip(ratios, c.intervals)),
        "bounded_by_first_length": all(r <= c.intervals[0].length for r in ratios),
    }


def condition_delta(s: KernelSchedule) -> dict:
    """Exact partial sums; under the pair rule the infinite tail from m is 1/m."""
    deltas = [e.delta for e in s.entries]
    N = len(deltas)
    partial = []
    acc = Fraction(0)
    for d in deltas:
        acc += d
        partial.append(acc)
    tails = {}
    if s.delta_rule == "pair":
        for m in range(1, N + 1):
            finite = sum(deltas[m - 1 :], Fraction(0))
            # remaining infinite tail telescopes to 1/(N+1)
            tails[m] = finite + Fraction(1, N + 1)
    return {
        "partial_sums": partial,
        "total": acc,
        "tails": tails,
        "tails_exact": all(t == Fraction(1, m) for m, t in tails.items()),
    }


def condition_q(s: KernelSchedule) -> dict:
    """Certified c_n < sin(pi delta_n / 2), i.e. (2/pi) arcsin(c_n) < delta_n."""
    ok = {}
    for e in s.entries:
        def gap(e=e):
            return iv.sin(iv.pi * to_iv(e.delta) / 2) - 1 / (iv.pi * to_iv(e.eps) * to_iv(e.q))
        ok[e.n] = certified.sign(gap) > 0
    return {"certified": ok, "all": all(ok.values())}
