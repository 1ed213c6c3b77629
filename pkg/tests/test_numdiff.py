import math
from fractions import Fraction

import pytest

from mazur66.errors import StepGeometryError
from mazur66.numdiff import (
    DEFAULT_LADDER,
    SMOOTH_PARTIALS,
    control,
    fd_mixed,
    fd_partial,
    instance_handle,
    interior_steps,
    observed_order,
    richardson_error,
)

P = (Fraction(1, 3), Fraction(1, 5))


@pytest.mark.parametrize("which", ["x", "y", "xx", "yy"])
def test_smooth_control_order_two(which):
    ref = SMOOTH_PARTIALS[which](1 / 3, 1 / 5)
    rep = fd_partial(control("smooth"), P, which, reference=ref)
    assert 1.7 <= rep.order <= 2.3
    assert abs(rep.extrapolated - ref) < 1e-8


@pytest.mark.parametrize("which", ["x", "y", "xx", "yy"])
def test_constant_gives_zero(which):
    rep = fd_partial(control("constant"), P, which)
    assert rep.estimates == [0.0] * len(DEFAULT_LADDER)


def test_quadratics_exact_up_to_rounding():
    rep = fd_partial(control("square-x"), P, "x")
    assert all(abs(e - 2 / 3) < 1e-13 for e in rep.estimates)
    rep = fd_partial(control("square-x"), P, "xx")
    assert all(abs(e - 2) < 1e-10 for e in rep.estimates)


def test_mixed_smooth():
    ref = -math.cos(1 / 3) * math.sin(1 / 5)
    rep = fd_mixed(control("smooth"), P, reference=ref)
    assert abs(rep.extrapolated - ref) < 1e-9
    assert 1.7 <= rep.order <= 2.3


def test_mixed_bilinear_exact():
    rep = fd_mixed(control("bilinear"), P)
    assert all(abs(e - 1) < 1e-12 for e in rep.estimates)


def test_nesting_orders_agree():
    f = control("smooth")
    for pt in [P, (Fraction(-1, 2), Fraction(3, 4)), (Fraction(1), Fraction(-1, 7))]:
        a, b = fd_mixed(f, pt, nesting="xy"), fd_mixed(f, pt, nesting="yx")
        assert abs(a.estimates[-1] - b.estimates[-1]) <= richardson_error(a) + richardson_error(b) + 1e-12


def test_mixed_at_witness_point_does_not_settle(inst6):
    from mazur66 import witness_ladder

    w = witness_ladder(inst6, inst6.cantor[1].a, 3, Fraction(1, 2), scales=1)[0]
    h = instance_handle(inst6)
    steps = [Fraction(1, 2**k) for k in range(9, 17)]
    pt = (w.x0, w.y0)
    rep = fd_mixed(h, pt, steps)
    smooth_err = richardson_error(fd_mixed(control("smooth"), (Fraction(1, 3), Fraction(1, 5)), steps))
    spread = max(rep.estimates) - min(rep.estimates)
    assert spread > 1e3 * smooth_err


def test_step_geometry_error():
    with pytest.raises(StepGeometryError):
        fd_partial(control("smooth"), (Fraction(199, 100), 0), "x")


def test_interior_steps_stay_inside(inst5):
    iv = inst5.cantor[9]
    pt = (Fraction(1, 3), iv.a + iv.length / 3)
    hs = interior_steps(inst5, pt, "yy")
    assert iv.a < pt[1] - hs[0] and pt[1] + hs[0] < iv.b
    with pytest.raises(StepGeometryError):
        interior_steps(inst5, (Fraction(1, 3), iv.a), "y")


def test_order_needs_three_steps():
    assert observed_order([Fraction(1, 2), Fraction(1, 4)], [1.0, 0.25]) is None
    assert observed_order([Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)], [1.0, 0.25, 0.0625]) == pytest.approx(2)


def test_csv_rows():
    rep = fd_partial(control("smooth"), P, "x", reference=SMOOTH_PARTIALS["x"](1 / 3, 1 / 5))
    text = rep.to_csv()
    lines = text.strip().splitlines()
    assert lines[0] == "x,y,which,step,estimate,error"
    assert len(lines) == 1 + len(DEFAULT_LADDER)
