from fractions import Fraction

import pytest

from mazur66 import default_instance


@pytest.fixture(scope="session")
def inst5():
    return default_instance(5)


@pytest.fixture(scope="session")
def inst6():
    return default_instance(6)


@pytest.fixture(scope="session")
def small_q_inst():
    """Depth-2 instance whose q_n stay small enough for grids to resolve.

    eps_n = |I_n|^3 * 64 keeps the ratio eps_n/|I_n|^2 proportional to |I_n|,
    and delta_n = 1/2, 1/4, 1/4 has total mass 1.
    """
    from mazur66 import assemble, build_cantor, get_profile, make_schedule

    c = build_cantor(2)
    s = make_schedule(c, lambda iv: 64 * iv.length**3, [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)])
    return assemble(c, get_profile(), s)
