import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from mazur66 import assemble, build_cantor, get_profile, make_schedule
from mazur66.counterexample import (
    active_terms,
    eval_all,
    make_witness,
    mixed_quotient_probe,
    witness_ladder,
)
from mazur66.errors import MismatchError, ParameterDomainError, PreconditionError
from mazur66.numdiff import control, fd_partial, instance_handle, interior_steps


def test_assemble_depth_one():
    c = build_cantor(1)
    inst = assemble(c, get_profile(), make_schedule(c))
    assert inst.N == 1 and inst.depth == 1


def test_assemble_mismatch():
    s = make_schedule(build_cantor(2))
    with pytest.raises(MismatchError):
        assemble(build_cantor(3), get_profile(), s)


def test_tail_certificate(inst5):
    t = inst5.tail
    for iv, d2 in zip(inst5.cantor.intervals, t.d2_exact):
        assert d2 == Fraction(3, 8) * iv.length
    assert t.nonincreasing and t.decays
    assert t.d2[0] == pytest.approx(3 / 8 / 4)


def test_zero_on_B(inst5):
    rng = np.random.default_rng(0)
    ys = [iv.a for iv in inst5.cantor.intervals] + [iv.b for iv in inst5.cantor.intervals] + [0, 1]
    for y in ys:
        for _ in range(5):
            x = Fraction(int(rng.integers(0, 2**20)), 2**20)
            ev = eval_all(inst5, x, y)
            assert (ev.f, ev.fx, ev.fy, ev.fxx, ev.fyy) == (0.0,) * 5
            assert ev.n is None


def test_single_active_term(inst5):
    rng = np.random.default_rng(1)
    for _ in range(10_000):
        y = Fraction(int(rng.integers(0, 2**24)), 2**24)
        act = active_terms(inst5, y)
        assert len(act) <= 1
        assert (act[0] if act else None) == eval_all(inst5, Fraction(1, 3), y).n


def test_midpoint_quarter_phase(inst5):
    k = 7
    iv, e = inst5.cantor[k], inst5.schedule[k]
    ev = eval_all(inst5, Fraction(1, 4 * e.q), iv.midpoint)
    with mpmath.workprec(256):
        want = mpmath.mpf(e.eps.numerator) / e.eps.denominator * 2 * mpmath.pi * e.q / 2 / 64
    assert abs(ev.fx - float(want)) <= ev.err["fx"]
    assert ev.fy == 0.0


def test_fyy_bounded_by_tail_constant(inst5):
    rng = np.random.default_rng(2)
    bound = 3 / 8 * 1 / 4
    for _ in range(10_000):
        x = Fraction(int(rng.integers(0, 2**30)), 2**30)
        y = Fraction(int(rng.integers(0, 2**30)), 2**30)
        assert abs(eval_all(inst5, x, y).fyy) <= bound


def test_domain_error(inst5):
    with pytest.raises(ParameterDomainError):
        eval_all(inst5, Fraction(3, 2), 0)


@pytest.mark.parametrize("which", ["x", "y", "xx", "yy"])
def test_closed_forms_match_finite_differences(inst5, which):
    h = instance_handle(inst5)
    for n in (1, 3, 12, 30):
        iv = inst5.cantor[n]
        x, y = Fraction(2**19 + 12345, 2**20), iv.a + Fraction(7, 20) * iv.length
        ref = getattr(eval_all(inst5, x, y), "f" + which)
        rep = fd_partial(h, (x, y), which, interior_steps(inst5, (x, y), which), reference=ref)
        assert 1.7 <= rep.order <= 2.3
        assert rep.extrapolated == pytest.approx(ref, rel=1e-8)


# -- witnesses ---------------------------------------------------------------

def test_witness_depth3(inst6):
    c = build_cantor(3)
    inst = assemble(c, get_profile(), make_schedule(c))
    w = make_witness(inst, c[1].a, 2, c[1].length)
    assert w.k > 2 and w.certified
    assert abs(w.y_k - w.y0) < w.delta
    assert w.osc >= Fraction(1, 64)
    assert eval_all(inst, w.x0, w.y0).fx == 0.0


def test_witness_shrinking_delta(inst6):
    y0 = inst6.cantor[1].a
    ws = witness_ladder(inst6, y0, 2, Fraction(1, 2), scales=5)
    assert len(ws) == 5
    d = [w.distance for w in ws]
    assert all(b < a for a, b in zip(d, d[1:]))
    assert all(w.certified and w.osc >= 1 / 64 for w in ws)
    assert len({w.x0 for w in ws}) == 1


def test_witness_requires_point_of_B(inst6):
    with pytest.raises(PreconditionError):
        make_witness(inst6, inst6.cantor[4].midpoint, 2, Fraction(1, 8))


def test_probe_lower_bound(inst6):
    ws = witness_ladder(inst6, inst6.cantor[1].a, 3, Fraction(1, 2))
    rows = mixed_quotient_probe(inst6, ws)
    for w, r in zip(ws, rows):
        assert r.lower_bound == pytest.approx((1 / 64) / float(w.distance))
        assert abs(r.quotient) >= r.lower_bound
    for a, b in zip(rows, rows[1:]):
        if abs(b.step) <= abs(a.step) / 2:
            assert b.lower_bound >= 2 * a.lower_bound


def test_probe_on_smooth_control_converges():
    f = control("smooth")
    x, y = Fraction(1, 3), Fraction(1, 5)
    qs = []
    for k in range(4, 12):
        h = Fraction(1, 2**k)
        fx = lambda yy: fd_partial(f, (x, yy), "x", [Fraction(1, 2**20)]).estimates[0]
        qs.append((fx(y + h) - fx(y)) / float(h))
    assert abs(qs[-1] - (-math.cos(1 / 3) * math.sin(1 / 5))) < 1e-3
    diffs = [abs(a - b) for a, b in zip(qs, qs[1:])]
    assert diffs[-1] < diffs[0]
