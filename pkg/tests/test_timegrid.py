import numpy as np
import pytest

from gepflex.system import Compression, StorageKind
from gepflex.timegrid import (
    build_time_grid,
    compress_series,
    embed_series,
    grid_for,
    hourly_grid,
    storage_levels,
    storage_scaling,
)

from helpers import storage

FULL = build_time_grid(Compression.FULL_YEAR)
HALF = build_time_grid(Compression.EVERY_OTHER_DAY)


def test_every_other_day_counts():
    assert HALF.simulated_days == 183
    assert HALF.simulated_hours == 4392
    assert HALF.physical_hours == 8760
    assert HALF.cost_scale == 2.0 and HALF.storage_scale == 2.0


def test_full_year_counts():
    assert FULL.simulated_days == 365
    assert FULL.simulated_hours == 8760
    assert FULL.cost_scale == 1.0 and FULL.storage_scale == 1.0
    assert not FULL.compressed


def test_day_map_ends():
    assert HALF.day_map[:3] == (1, 3, 5)
    assert HALF.day_map[-1] == 365


def test_compress_constant():
    out = compress_series(HALF, np.full(8760, 5.0))
    assert out.shape == (4392,) and np.all(out == 5.0)


def test_compress_hour_index():
    out = compress_series(HALF, np.arange(8760.0))
    np.testing.assert_array_equal(out[:24], np.arange(24))
    np.testing.assert_array_equal(out[24:48], np.arange(48, 72))


def test_full_grid_is_identity():
    x = np.random.default_rng(0).random(8760)
    np.testing.assert_array_equal(compress_series(FULL, x), x)


def test_wrong_length():
    with pytest.raises(ValueError, match="8759"):
        compress_series(HALF, np.zeros(8759))


def test_embed_then_compress_is_identity():
    x = np.random.default_rng(1).random(4392)
    np.testing.assert_array_equal(compress_series(HALF, embed_series(HALF, x)), x)


def test_embed_fills_skipped_day():
    x = np.arange(4392.0)
    full = embed_series(HALF, x)
    np.testing.assert_array_equal(full[24:48], x[:24])


@pytest.mark.parametrize("kind,expected", [
    ("pump_daily", (2, 2, 2, 2)),
    ("pump_seasonal", (2, 2, 2, 1)),
    ("dam", (2, 2, 2, 1)),
    ("battery", (1, 1, 1, 1)),
])
def test_storage_scaling_compressed(kind, expected):
    s = storage_scaling(HALF, StorageKind(kind))
    assert (s.charge_coeff, s.discharge_coeff, s.inflow_coeff, s.bound_scale) == expected


@pytest.mark.parametrize("kind", list(StorageKind))
def test_storage_scaling_full(kind):
    s = storage_scaling(FULL, kind)
    assert (s.charge_coeff, s.discharge_coeff, s.inflow_coeff, s.bound_scale) == (1, 1, 1, 1)


def test_month_of():
    assert FULL.month_of(0) == 1
    assert FULL.month_of(31 * 24) == 2
    assert FULL.month_of(8759) == 12
    # simulated day 16 is physical day 31 (Jan 31), day 17 is Feb 2
    assert HALF.month_of(15 * 24) == 1
    assert HALF.month_of(16 * 24) == 2


def test_physical_hour():
    assert HALF.physical_hour(0) == 0
    assert HALF.physical_hour(25) == 49
    np.testing.assert_array_equal(
        HALF.physical_hours_index(), [HALF.physical_hour(t) for t in range(4392)]
    )


def test_grid_for_short_horizon():
    g = grid_for("full_year", 5)
    assert g.simulated_hours == 5 and g.cost_scale == 1.0
    with pytest.raises(ValueError):
        grid_for("every_other_day", 5)
    assert hourly_grid(7).day_map == (1,)


def test_two_identical_days_identity():
    rng = np.random.default_rng(3)
    unit = storage(kind="pump_daily", n=48, eta_ch=0.85, eta_dis=0.92)
    for _ in range(20):
        ch = rng.uniform(0, 5, 24)
        dis = rng.uniform(0, 5, 24)
        xi = rng.uniform(0, 2, 24)
        one = storage_scaling(FULL, unit)
        two_days = storage_levels(unit, one, 0.0, np.tile(ch, 2), np.tile(dis, 2), np.tile(xi, 2))
        comp = storage_levels(unit, storage_scaling(HALF, unit), 0.0, ch, dis, xi)
        assert abs(comp[-1] - two_days[-1]) <= 1e-9
