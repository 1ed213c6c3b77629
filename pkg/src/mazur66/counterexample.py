"""The function f(x, y) = sum_n phi_n(x) psi_n(y) and its discontinuity witnesses.

The psi_n have pairwise disjoint supports I_n, so at any y at most one term
is nonzero and every partial derivative is a single closed-form product.
The object here is the exact depth-K function; nothing is truncated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cantor import CantorSet, Interval, as_fraction, build_cantor, find_interval_near, in_B
from .errors import DepthExhaustedError, MismatchError, ParameterDomainError, PreconditionError
from .kernels import (
    BumpProfile,
    KernelSchedule,
    OscillatorEval,
    bump_eval,
    find_point_in_tail,
    get_profile,
    in_A_n,
    make_schedule,
    phi_eval,
)

ULP = 2.0**-52


@dataclass(frozen=True)
class TailCertificate:
    """Per-index bounds sup|(phi_n psi_n)'_y| and sup|(phi_n psi_n)''_yy|."""

    d1: tuple[float, ...]
    d2: tuple[float, ...]
    d2_exact: tuple[Fraction, ...] | None

    @property
    def nonincreasing(self) -> bool:
        return all(b <= a for a, b in zip(self.d1, self.d1[1:])) and all(
            b <= a for a, b in zip(self.d2, self.d2[1:])
        )

    @property
    def decays(self) -> bool:
        return len(self.d2) >= 2 and self.d1[-1] < self.d1[0] and self.d2[-1] < self.d2[0]


def tail_certificate(c: CantorSet, p: BumpProfile, s: KernelSchedule) -> TailCertificate:
    d1, d2, d2x = [], [], []
    for iv, e in zip(c.intervals, s.entries):
        d1.append(float(e.eps / iv.length) * p.sup_d1)
        d2.append(float(e.eps / iv.length**2) * float(p.sup_d2))
        if p.exact:
            d2x.append(e.eps / iv.length**2 * p.sup_d2)
    return TailCertificate(tuple(d1), tuple(d2), tuple(d2x) if p.exact else None)


@dataclass(frozen=True)
class Instance:
    cantor: CantorSet
    profile: BumpProfile
    schedule: KernelSchedule
    tail: TailCertificate = field(compare=False)

    @property
    def depth(self) -> int:
        return self.cantor.depth

    @property
    def N(self) -> int:
        return len(self.cantor)


def assemble(c: CantorSet, p: BumpProfile, s: KernelSchedule) -> Instance:
    if len(s) != len(c):
        raise MismatchError(f"schedule covers {len(s)} indices, the set has {len(c)} intervals")
    if [e.n for e in s.entries] != list(range(1, len(c) + 1)):
        raise MismatchError("schedule indices are not 1..N in order")
    return Instance(c, p, s, tail_certificate(c, p, s))


def default_instance(depth: int = 5, ratio=1, profile: str = "poly3") -> Instance:
    c = build_cantor(depth, ratio)
    return assemble(c, get_profile(profile), make_schedule(c))


@dataclass(frozen=True)
class Eval:
    x: Fraction
    y: Fraction
    n: int | None
    f: float
    fx: float
    fy: float
    fxx: float
    fyy: float
    err: dict = field(default_factory=dict)


def _point(x, y) -> tuple[Fraction, Fraction]:
    x, y = as_fraction(x, "x"), as_fraction(y, "y")
    if not (0 <= x <= 1 and 0 <= y <= 1):
        raise ParameterDomainError(f"({x}, {y}) is outside the unit square")
    return x, y


def eval_all(inst: Instance, x, y) -> Eval:
    x, y = _point(x, y)
    iv = inst.cantor.containing(y)
    if iv is None:
        zero = {k: 0.0 for k in ("f", "fx", "fy", "fxx", "fyy")}
        return Eval(x, y, None, 0.0, 0.0, 0.0, 0.0, 0.0, zero)
    t = (y - iv.a) / iv.length
    L = float(iv.length)
    p = inst.profile
    psi = [float(bump_eval(p, t, k)) for k in range(3)]
    psi[1] /= L
    psi[2] /= L * L
    ph: OscillatorEval = phi_eval(inst.schedule, iv.n, x)

    def prod(v, ve, w):
        # product of a float with error ve and a correctly rounded psi factor
        return v * w, ve * abs(w) + 3 * ULP * abs(v * w)

    f, ef = prod(ph.value, ph.value_err, psi[0])
    fx, efx = prod(ph.d1, ph.d1_err, psi[0])
    fy, efy = prod(ph.value, ph.value_err, psi[1])
    fxx, efxx = prod(ph.d2, ph.d2_err, psi[0])
    fyy, efyy = prod(ph.value, ph.value_err, psi[2])
    err = {"f": ef, "fx": efx, "fy": efy, "fxx": efxx, "fyy": efyy}
    return Eval(x, y, iv.n, f, fx, fy, fxx, fyy, err)


def active_terms(inst: Instance, y) -> list[int]:
    """Indices n with psi_n(y) != 0, by brute force over all intervals."""
    y = as_fraction(y, "y")
    return [iv.n for iv in inst.cantor.intervals if bump_eval(inst.profile, (y - iv.a) / iv.length) != 0]


class InstanceFunction:
    """Picklable (x, y) -> f(x, y) callable backed by exact evaluation."""

    exact = True

    def __init__(self, inst: Instance, which: str = "f"):
        self.inst = inst
        self.which = which

    def __call__(self, x, y) -> float:
        return getattr(eval_all(self.inst, x, y), self.which)


# -- witnesses ---------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    x0: Fraction
    y0: Fraction
    m: int
    k: int
    y_k: Fraction
    delta: Fraction
    osc: float
    osc_err: float
    bound: Fraction | float
    certified: bool

    @property
    def distance(self) -> Fraction:
        return abs(self.y_k - self.y0)

    def to_json(self) -> dict:
        return {
            "bound": str(Fraction(self.bound)) if isinstance(self.bound, Fraction) else repr(self.bound),
            "certified": self.certified,
            "delta": str(self.delta),
            "distance": str(self.distance),
            "k": self.k,
            "m": self.m,
            "osc": repr(self.osc),
            "osc_err": repr(self.osc_err),
            "x0": str(self.x0),
            "y0": str(self.y0),
            "y_k": str(self.y_k),
        }


def make_witness(inst: Instance, y0, m: int, delta, x0=None) -> Witness:
    """Certify |f'_x(x0, y_k) - f'_x(x0, y0)| >= max psi near y0 in B.

    ``x0`` defaults to the first dyadic point of A_m, ..., A_N; pass it in to
    reuse one point across a ladder of scales.
    """
    y0 = as_fraction(y0, "y0")
    if not in_B(inst.cantor, y0):
        raise PreconditionError(f"y0 = {y0} is not in B")
    if m < 1:
        raise ParameterDomainError("m must be >= 1")
    delta = as_fraction(delta, "delta")
    if x0 is None:
        x0 = find_point_in_tail(inst.schedule, m, inst.N)
    x0 = as_fraction(x0, "x0")
    ik: Interval = find_interval_near(inst.cantor, y0, delta, m)
    p = inst.profile
    y_k = ik.a + p.argmax * ik.length
    e_k = eval_all(inst, x0, y_k)
    e_0 = eval_all(inst, x0, y0)
    osc = abs(e_k.fx - e_0.fx)
    cert = in_A_n(inst.schedule, ik.n, x0)
    return Witness(
        x0=x0,
        y0=y0,
        m=m,
        k=ik.n,
        y_k=y_k,
        delta=delta,
        osc=osc,
        osc_err=e_k.err["fx"] + e_0.err["fx"],
        bound=p.max_value,
        certified=cert,
    )


def witness_ladder(inst: Instance, y0, m: int, delta, scales: int | None = None) -> list[Witness]:
    """Witnesses at strictly shrinking distances from y0.

    Each next window has radius |y_k - y0| of the previous witness, which
    excludes I_k and forces a strictly closer interval. Stops when the depth
    runs out or after ``scales`` witnesses.
    """
    x0 = find_point_in_tail(inst.schedule, m, inst.N)
    out: list[Witness] = []
    delta = as_fraction(delta, "delta")
    while scales is None or len(out) < scales:
        try:
            w = make_witness(inst, y0, m, delta, x0=x0)
        except DepthExhaustedError:
            if not out:
                raise
            break
        out.append(w)
        delta = w.distance
    return out


@dataclass(frozen=True)
class ProbeRow:
    step: Fraction
    quotient: float
    lower_bound: float


def mixed_quotient_probe(inst: Instance, witnesses: Witness | Sequence[Witness]) -> list[ProbeRow]:
    """(f'_x(x0, y0 + h) - f'_x(x0, y0)) / h for h = y_k - y0 along the witnesses."""
    if isinstance(witnesses, Witness):
        witnesses = [witnesses]
    rows = []
    for w in witnesses:
        h = w.y_k - w.y0
        q = (eval_all(inst, w.x0, w.y_k).fx - eval_all(inst, w.x0, w.y0).fx) / float(h)
        rows.append(ProbeRow(h, q, float(Fraction(w.bound) / abs(h))))
    return rows
