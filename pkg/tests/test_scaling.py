import numpy as np
import pytest

from assb.scaling import CollapsePoint, collapse_cost, collapse_fit


def dyadic_collapse_points():
    """Exactly collapsing data: power-of-two sizes and dyadic p make the scaled
    coordinate x = L**2 * p bitwise identical across sizes."""
    xs = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0]
    pts = []
    for L in (4, 8, 16):
        for x in xs:
            p = x / L**2
            pts.append(CollapsePoint(L, p, float(np.exp(-((L**2 * p) ** 2)))))
    return pts


def generic_points(nu=0.5, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    pts = []
    for L in (4, 5, 6, 7, 8):
        for p in (0.01, 0.02, 0.05, 0.1, 0.2, 0.3):
            x = L ** (1 / nu) * p
            y = 1.0 / (1.0 + x) + noise * rng.normal()
            pts.append(CollapsePoint(L, p, float(y), sigma=noise))
    return pts


class TestCollapsePoint:
    def test_validation(self):
        with pytest.raises(ValueError):
            CollapsePoint(1, 0.1, 0.5)
        with pytest.raises(ValueError):
            CollapsePoint(4, -0.1, 0.5)
        with pytest.raises(ValueError):
            CollapsePoint(4, 0.1, 0.5, sigma=-1)


class TestCollapseCost:
    def test_perfect_collapse_has_vanishing_cost(self):
        assert collapse_cost(dyadic_collapse_points(), 0.5) < 1e-20

    def test_wrong_exponent_costs_more(self):
        pts = dyadic_collapse_points()
        assert collapse_cost(pts, 1.0) > collapse_cost(pts, 0.5)

    def test_generic_data_ranks_exponents(self):
        pts = generic_points(nu=0.5)
        c_half = collapse_cost(pts, 0.5)
        assert c_half < collapse_cost(pts, 0.25)
        assert c_half < collapse_cost(pts, 1.0)

    def test_input_validation(self):
        pts = dyadic_collapse_points()
        with pytest.raises(ValueError):
            collapse_cost(pts[:3], 0.5)
        with pytest.raises(ValueError):
            collapse_cost([p for p in pts if p.L == 4], 0.5)
        with pytest.raises(ValueError):
            collapse_cost(pts, -1.0)

    def test_unbracketed_points_rejected(self):
        # disjoint scaled ranges leave nothing to interpolate
        pts = [CollapsePoint(4, p, p) for p in (0.001, 0.002, 0.003)]
        pts += [CollapsePoint(8, p, p) for p in (10.0, 20.0, 30.0)]
        with pytest.raises(ValueError):
            collapse_cost(pts, 1.0)


class TestCollapseFit:
    def test_recovers_known_exponent(self):
        res = collapse_fit(generic_points(nu=0.5))
        assert 0.48 <= res.nu <= 0.52
        assert not res.ambiguous

    def test_recovers_other_exponent(self):
        res = collapse_fit(generic_points(nu=0.8))
        assert abs(res.nu - 0.8) < 0.02

    def test_rescaling_p_leaves_exponent_unchanged(self):
        pts = generic_points(nu=0.5)
        scaled = [CollapsePoint(q.L, 3.0 * q.p, q.y, q.sigma) for q in pts]
        a = collapse_fit(pts)
        b = collapse_fit(scaled)
        assert abs(a.nu - b.nu) < 0.02

    def test_small_noise_barely_moves_exponent(self):
        res = collapse_fit(generic_points(nu=0.5, noise=0.01, seed=4))
        assert abs(res.nu - 0.5) < 0.05
        assert res.nu_stderr > 0.0

    def test_bootstrap_spread_is_reported(self):
        res = collapse_fit(generic_points(nu=0.5, noise=0.005, seed=1))
        assert res.nu_stderr > 0
        assert res.cost >= 0

    def test_deterministic_given_seed(self):
        pts = generic_points(nu=0.5, noise=0.01, seed=2)
        a = collapse_fit(pts, seed=11)
        b = collapse_fit(pts, seed=11)
        assert a == b
