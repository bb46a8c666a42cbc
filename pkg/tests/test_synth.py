import numpy as np
import pytest

from loadbench.errors import BadValue
from loadbench.synth import SynthSpec, generate


def test_determinism():
    a = generate(SynthSpec(n_buildings=4, n_steps=700, n_types=2, seed=5))
    b = generate(SynthSpec(n_buildings=4, n_steps=700, n_types=2, seed=5))
    for ra, rb in zip(a, b):
        np.testing.assert_array_equal(ra.load.values, rb.load.values)
        np.testing.assert_array_equal(
            ra.weather.dry_bulb_temp_c, rb.weather.dry_bulb_temp_c
        )
        assert ra.static == rb.static


def test_seed_changes_data():
    a = generate(SynthSpec(n_buildings=2, n_steps=700, seed=1))
    b = generate(SynthSpec(n_buildings=2, n_steps=700, seed=2))
    assert not np.array_equal(a[0].load.values, b[0].load.values)


def test_types_round_robin():
    pool = generate(SynthSpec(n_buildings=6, n_steps=700, n_types=3, seed=0))
    labels = [r.static.building_type for r in pool]
    assert len(set(labels)) == 3
    assert labels[0] == labels[3] and labels[1] == labels[4]


def test_scale_progression():
    spec = SynthSpec(n_buildings=4, n_steps=2000, n_types=4, seed=3)
    pool = generate(spec)
    means = [r.load.values.mean() for r in pool]
    # type index i has scale base + i*step, so mean load increases with type
    assert all(m2 > m1 for m1, m2 in zip(means, means[1:]))
    assert means[0] == pytest.approx(spec.type_scale(0), rel=0.2)


def test_static_geometry_tracks_scale():
    spec = SynthSpec(n_buildings=3, n_steps=700, n_types=3, seed=0)
    pool = generate(spec)
    for i, rec in enumerate(pool):
        assert rec.static.floor_space_ft2 == pytest.approx(
            spec.type_scale(i) * 2500.0
        )


def test_loads_clipped_nonnegative():
    spec = SynthSpec(n_buildings=2, n_steps=3000, n_types=1, seed=9,
                     noise_std=8.0)  # huge noise forces clipping
    pool = generate(spec)
    for rec in pool:
        assert rec.load.values.min() == 0.0


def test_weather_coupling_visible():
    # with large coupling the load/temperature correlation must be positive
    spec = SynthSpec(n_buildings=1, n_steps=5000, seed=4, coupling=2.0,
                     noise_std=0.01)
    rec = generate(spec)[0]
    r = np.corrcoef(rec.load.values, rec.weather.dry_bulb_temp_c)[0, 1]
    assert r > 0.5


def test_spec_validation():
    with pytest.raises(BadValue):
        SynthSpec(n_buildings=2, n_types=5)
    with pytest.raises(BadValue):
        SynthSpec(n_buildings=0)
    with pytest.raises(BadValue):
        SynthSpec(noise_std=-1.0)
