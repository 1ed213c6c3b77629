from fractions import Fraction

import numpy as np
import pytest

from mazur66.errors import ParameterDomainError, WindowError
from mazur66.numdiff import control, instance_handle
from mazur66.scanner import ScanConfig, scan, test_A_mn as check_A, test_B_mn as check_B

ORIGIN = (Fraction(0), Fraction(0))
SQ = ((Fraction(-1), Fraction(1)), (Fraction(-1), Fraction(1)))


def test_A_constant():
    f = control("constant")
    assert all(check_A(f, ORIGIN, m, n) for m in (1, 8, 100) for n in (1, 4, 64))


def test_A_identity_wide_window():
    assert not check_A(control("x"), ORIGIN, 1, 1)
    assert check_A(control("x"), ORIGIN, 1, 4)


def test_B_identity_and_abs():
    assert all(check_B(control("x"), ORIGIN, m, n) for m in (1, 64) for n in (1, 16))
    # quotients 0 (u = -v) and 1/3 (u = 2t, v = -t) appear among the samples
    assert not check_B(control("abs-x"), ORIGIN, 4, 1)
    assert not check_B(control("abs-x"), ORIGIN, 4, 64)


def test_B_square_for_large_n():
    f = control("square-x")
    pt = (Fraction(1, 2), Fraction(0))
    assert not check_B(f, pt, 8, 2)
    assert check_B(f, pt, 8, 16)


def test_window_error():
    with pytest.raises(WindowError):
        check_A(control("x"), (Fraction(19, 10), 0), 1, 2)


def test_config_validation():
    with pytest.raises(ParameterDomainError):
        ScanConfig(SQ, subsample=3)


@pytest.mark.parametrize("name", ["smooth", "abs-x", "square-x"])
def test_nested_subsamples_only_add_constraints(name):
    f = control(name)
    for x in (Fraction(0), Fraction(1, 7), Fraction(-3, 5)):
        for m in (2, 8, 32):
            for n in (2, 8, 32):
                for s, s2 in ((4, 9), (9, 19)):
                    if not check_B(f, (x, Fraction(0)), m, n, s):
                        assert not check_B(f, (x, Fraction(0)), m, n, s2)
                    if not check_A(f, (x, Fraction(0)), m, n, s):
                        assert not check_A(f, (x, Fraction(0)), m, n, s2)


def test_smooth_fully_in_E():
    em = scan(control("smooth"), ScanConfig(SQ, 32, 32))
    assert em.inE.all()


@pytest.mark.parametrize("grid", [16, 32, 64])
def test_abs_excludes_zero_column_under_refinement(grid):
    em = scan(control("abs-x"), ScanConfig(SQ, grid, 8))
    assert [em.xs[i] for i in em.excluded_columns()] == [0]


def test_instance_rows_in_E(inst5):
    edge = Fraction(1, 64)
    em = scan(instance_handle(inst5), ScanConfig(((edge, 1 - edge), (edge, 1 - edge)), 16, 16))
    assert em.inE.all()


def test_csv_and_summary():
    em = scan(control("abs-x"), ScanConfig(SQ, 8, 2))
    lines = em.to_csv().splitlines()
    assert lines[0] == "x,y,inA,inB,inE"
    assert len(lines) == 1 + 16
    assert em.summary()["excluded_columns"] == ["0"]


def test_parallel_matches_serial():
    cfg = ScanConfig(SQ, 8, 4)
    a = scan(control("abs-x"), cfg)
    b = scan(control("abs-x"), cfg, workers=2)
    assert np.array_equal(a.inA, b.inA) and np.array_equal(a.inB, b.inB)
