import math

import numpy as np
import pytest
from scipy import stats

from lowres_mimo.scenario import (
    CellGeometry,
    Fixed,
    ScaledByM,
    SystemConfig,
    UserLink,
    drop_users,
    effective_power,
    rng_stream,
    sample_hexagon,
)


def test_pathloss_reference_distance():
    g = CellGeometry()
    assert g.large_scale_gain(100.0, 1.0) == 1.0


def test_pathloss_at_cell_edge():
    g = CellGeometry()
    assert g.large_scale_gain(1000.0, 1.0) == pytest.approx(10 ** -3.8, rel=1e-12)
    assert 10 ** -3.8 == pytest.approx(1.585e-4, rel=1e-3)


def test_hexagon_samples_inside_and_outside_disc():
    g = CellGeometry()
    x, y = sample_hexagon(g, 20_000, rng_stream(3, 0))
    assert np.all(g.contains(x, y))
    assert np.all(np.hypot(x, y) >= g.r_min)
    # hexagon vertices are on the x axis: no point beyond the radius
    assert np.all(np.hypot(x, y) <= g.radius + 1e-9)


def test_hexagon_area_fraction():
    # fraction of accepted points in the right half matches symmetry
    g = CellGeometry()
    x, _ = sample_hexagon(g, 100_000, rng_stream(4, 0))
    assert abs(np.mean(x > 0) - 0.5) < 0.01


def test_drop_reproducible():
    g = CellGeometry()
    assert drop_users(g, 10, 42, 10.0) == drop_users(g, 10, 42, 10.0)
    assert drop_users(g, 10, 42) != drop_users(g, 10, 43)
    assert drop_users(g, 10, 42) != drop_users(g, 10, 42, drop_index=1)


def test_shadowing_moments():
    g = CellGeometry()
    users = drop_users(g, 100_000, 5)
    rng = rng_stream(5, 0)
    x, y = sample_hexagon(g, 100_000, rng)
    r = np.hypot(x, y)
    beta = np.array([u.beta for u in users])
    shadow_db = 10 * np.log10(beta / (r / g.r_min) ** -g.pathloss_exponent)
    assert abs(shadow_db.mean()) < 0.08  # 1% of 8 dB
    assert shadow_db.std() == pytest.approx(8.0, rel=0.01)


def test_theta_uniform_chi_square():
    users = drop_users(CellGeometry(), 100_000, 9)
    theta = np.array([u.theta for u in users])
    assert np.all(np.abs(theta) <= math.pi / 2)
    counts, _ = np.histogram(theta, bins=50, range=(-math.pi / 2, math.pi / 2))
    assert stats.chisquare(counts).pvalue > 0.01


def test_drop_rejects_bad_inputs():
    with pytest.raises(ValueError):
        drop_users(CellGeometry(), 0, 1)
    with pytest.raises(ValueError):
        CellGeometry(radius=100, r_min=100)


def test_effective_power():
    assert effective_power(SystemConfig(transmit_power=10.0), 7) == 10.0
    assert effective_power(SystemConfig(transmit_power=10.0), 700) == 10.0
    cfg = SystemConfig(power_scaling=ScaledByM(1.0), reference_energy=10.0)
    assert effective_power(cfg, 100) == pytest.approx(0.1)
    cfg = SystemConfig(power_scaling=ScaledByM(0.5), reference_energy=4.0)
    assert effective_power(cfg, 16) == 1.0


def test_config_invariants():
    with pytest.raises(ValueError):
        SystemConfig(num_users=10, pilot_length=5)
    with pytest.raises(ValueError):
        SystemConfig(power_scaling=ScaledByM(1.0), transmit_power=3.0)
    with pytest.raises(ValueError):
        ScaledByM(0.0)
    with pytest.raises(ValueError):
        SystemConfig(adc_bits=0)
    assert SystemConfig(adc_bits=math.inf).adc_bits == math.inf
    assert SystemConfig().transmit_power == 10.0
    assert isinstance(SystemConfig().power_scaling, Fixed)
    assert SystemConfig(transmit_power=1.0, pilot_length=10).pilot_power == 10.0


def test_userlink_validation():
    with pytest.raises(ValueError):
        UserLink(0.0)
    with pytest.raises(ValueError):
        UserLink(1.0, -1.0)
    with pytest.raises(ValueError):
        UserLink(1.0, 0.0, 2.0)
