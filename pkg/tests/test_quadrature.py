import math

import numpy as np
import pytest
from scipy.special import ellipe

from syzmirror.quadrature import QuadratureError, initial_cells, integrate_polar


def disk_potential(R, p):
    """Closed form of the integral of 1/|z - p| over |z| <= R, |p| <= R."""
    return 4 * R * ellipe((abs(p) / R) ** 2)


def test_constant_integrates_to_area():
    res = integrate_polar(lambda z: np.ones(z.shape), initial_cells(2.0, [1.0], []))
    assert res.value == pytest.approx(4 * math.pi, rel=1e-13)


def test_smooth_polynomial():
    # |z|^2 over the unit disk is pi/2
    res = integrate_polar(lambda z: np.abs(z) ** 2, initial_cells(1.0, [], []))
    assert res.value == pytest.approx(math.pi / 2, rel=1e-13)


@pytest.mark.parametrize("p", [1.0, 1j * 0.5 + 0.5, -1.5j])
def test_point_singularity_on_a_corner(p):
    R = 2.0
    cells = initial_cells(R, [abs(p)], [p])
    res = integrate_polar(lambda z: 1 / np.abs(z - p), cells, rtol=1e-11, singular=[(p, 0.0)])
    assert res.value == pytest.approx(disk_potential(R, p), rel=1e-9)


def test_narrow_peak_is_graded():
    R, p, eps = 2.0, 1.0, 1e-4
    cells = initial_cells(R, [abs(p)], [p])
    res = integrate_polar(lambda z: 1 / np.hypot(np.abs(z - p), eps), cells, rtol=1e-11,
                          singular=[(p, eps)])
    # regularizing the peak removes 2 pi eps to first order
    assert res.value == pytest.approx(disk_potential(R, p) - 2 * math.pi * eps, abs=1e-6)


def test_budget_exhaustion_reports_estimate():
    cells = initial_cells(1.0, [], [])
    with pytest.raises(QuadratureError) as info:
        integrate_polar(lambda z: np.cos(40 * z.real), cells, rtol=1e-14, max_cells=10)
    assert math.isfinite(info.value.estimate)


def test_cells_cover_disk():
    cells = initial_cells(3.0, [1.0, 2.0], [2.0j])
    r0, r1, t0, t1, _ = cells.T
    area = np.sum((r1 ** 2 - r0 ** 2) / 2 * (t1 - t0))
    assert area == pytest.approx(9 * math.pi, rel=1e-14)
    assert (cells[:, 4] >= 0).sum() >= 1
