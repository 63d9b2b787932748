import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multipoint.errors import CoincidentScatterersError, ConfigurationError
from multipoint.model import (
    AlternatingDistanceTerms,
    Configuration,
    Point3,
    alpha_alternating,
    load_configuration,
    make_polygon,
    make_tetrahedron,
    polygon_alpha,
    save_configuration,
)


def _eq16_direct(m, r0):
    # alpha from raw vertex distances, no closed-form chords
    z = make_polygon(m, r0).positions
    return -math.fsum((-1) ** k / (4 * math.pi * np.linalg.norm(z[k - 1] - z[0])) for k in range(2, 2 * m + 1))


@pytest.mark.parametrize("edge", [0.5, 1.0, 2.0, 3.7])
def test_tetrahedron_distances_and_alpha(edge):
    config = make_tetrahedron(edge)
    assert config.n == 4
    D = config.pairwise_distances()
    off = D[~np.eye(4, dtype=bool)]
    assert np.allclose(off, edge, rtol=1e-14, atol=0)
    assert np.all(np.diag(D) == 0)
    assert np.all(config.alphas == -1 / (4 * math.pi * edge))


def test_tetrahedron_values():
    assert make_tetrahedron(1).alphas[0] == pytest.approx(-0.0795774715, abs=1e-10)
    assert make_tetrahedron(2).alphas[0] == pytest.approx(-0.0397887358, abs=1e-10)


@pytest.mark.parametrize("edge", [0, -1.0, math.nan, math.inf])
def test_tetrahedron_rejects_bad_edge(edge):
    with pytest.raises(ValueError):
        make_tetrahedron(edge)


def test_segment():
    config = make_polygon(1, 0.5)
    assert np.array_equal(config.positions, [[0.5, 0, 0], [-0.5, 0, 0]])
    assert config.alphas[0] == pytest.approx(-1 / (4 * math.pi), rel=1e-15)


def test_square_alpha_hand_value():
    # |z2-z1| = |z4-z1| = sqrt(2), |z3-z1| = 2
    expected = -(math.sqrt(2) - 0.5) / (4 * math.pi)
    config = make_polygon(2, 1.0)
    assert config.alphas[0] == pytest.approx(expected, rel=1e-15)
    angles = np.arctan2(config.positions[:, 1], config.positions[:, 0]) % (2 * math.pi)
    assert np.allclose(angles, [0, math.pi / 2, math.pi, 3 * math.pi / 2])


def test_folded_alpha_examples():
    a1, t1 = alpha_alternating(1, 0.5)
    assert a1 == pytest.approx(-1 / (4 * math.pi), rel=1e-15)
    assert t1.u == pytest.approx((1 / (4 * math.pi),))
    a2, t2 = alpha_alternating(2, 1.0)
    assert a2 == pytest.approx(-(1 / (2 * math.pi * math.sqrt(2)) - 1 / (8 * math.pi)), rel=1e-15)
    assert t2.m == 2


def test_alpha_negative_m3():
    assert polygon_alpha(3, 1.0) < 0


@pytest.mark.parametrize("m", range(1, 49))
def test_alpha_forms_agree(m):
    folded, terms = alpha_alternating(m, 1.0)
    full = polygon_alpha(m, 1.0)
    assert abs(folded - full) <= 1e-14 * abs(full)
    assert abs(_eq16_direct(m, 1.0) - full) <= 1e-14 * abs(full)
    assert all(a > b for a, b in zip(terms.u, terms.u[1:])) and terms.u[-1] > 0
    assert full < 0


@settings(max_examples=60, deadline=None)
@given(m=st.integers(1, 48), r0=st.floats(1e-3, 1e3))
def test_alpha_forms_agree_any_radius(m, r0):
    folded, _ = alpha_alternating(m, r0)
    assert abs(folded - polygon_alpha(m, r0)) <= 1e-14 * abs(folded)
    assert folded < 0


@settings(max_examples=40, deadline=None)
@given(m=st.integers(1, 48), r0=st.floats(1e-3, 1e3))
def test_polygon_on_circle_in_plane(m, r0):
    z = make_polygon(m, r0).positions
    assert np.allclose(np.linalg.norm(z, axis=1), r0, rtol=1e-14)
    assert np.all(z[:, 2] == 0)


def test_alternating_terms_invariant():
    with pytest.raises(ValueError):
        AlternatingDistanceTerms((1.0, 1.0))
    with pytest.raises(ValueError):
        AlternatingDistanceTerms((1.0, 0.0))


@pytest.mark.parametrize("m,r0", [(0, 1.0), (2, 0.0), (2, -1.0), (1.5, 1.0)])
def test_polygon_rejects_bad_args(m, r0):
    with pytest.raises(ValueError):
        make_polygon(m, r0)
    with pytest.raises(ValueError):
        alpha_alternating(m, r0)


def test_coincident_positions_rejected():
    with pytest.raises(CoincidentScatterersError, match="coincident"):
        Configuration.from_arrays([[0, 0, 0], [1, 0, 0], [0, 0, 0]], 1.0)
    # the threshold is configurable
    Configuration.from_arrays([[0, 0, 0], [1e-9, 0, 0]], 1.0)
    with pytest.raises(CoincidentScatterersError):
        Configuration.from_arrays([[0, 0, 0], [1e-9, 0, 0]], 1.0, min_separation=1e-6)


def test_non_finite_rejected():
    with pytest.raises(ConfigurationError):
        Point3(0, math.nan, 0)
    with pytest.raises(ConfigurationError):
        Configuration.from_arrays([[0, 0, 0]], math.inf)


def test_load_minimal():
    config = load_configuration('{"scatterers":[{"position":[0,0,0],"alpha":1.0}]}')
    assert config.n == 1 and config.alphas[0] == 1.0


def test_roundtrip_examples():
    for config in (make_tetrahedron(1.3), make_polygon(7, 0.3)):
        text = save_configuration(config)
        back = load_configuration(text)
        assert np.array_equal(back.positions, config.positions)
        assert np.array_equal(back.alphas, config.alphas)
        assert save_configuration(back) == text


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), st.floats(-1e6, 1e6),
                          st.floats(-1e6, 1e6)), min_size=1, max_size=6, unique_by=lambda t: t[:3]))
def test_roundtrip_is_lossless(rows):
    arr = np.array(rows)
    try:
        config = Configuration.from_arrays(arr[:, :3], arr[:, 3])
    except CoincidentScatterersError:
        return
    back = load_configuration(save_configuration(config))
    assert np.array_equal(back.positions, config.positions)
    assert np.array_equal(back.alphas, config.alphas)


def test_seventeen_digits():
    text = save_configuration(Configuration.from_arrays([[0.1, 0, 0]], 1 / 3))
    assert "0.10000000000000001" in text
    assert "0.33333333333333331" in text


@pytest.mark.parametrize("doc,path", [
    ("{", "$"),
    ("[]", "$"),
    ("{}", "scatterers"),
    ('{"scatterers": [{"alpha": 1}]}', "scatterers[0].position"),
    ('{"scatterers": [{"position": [0, 0, 0]}]}', "scatterers[0].alpha"),
    ('{"scatterers": [{"position": [0, 0], "alpha": 1}]}', "scatterers[0].position"),
    ('{"scatterers": [{"position": [0, "a", 0], "alpha": 1}]}', "scatterers[0].position[1]"),
    ('{"scatterers": [{"position": [0, 0, 0], "alpha": 1}, {"position": [1, 0, 0], "alpha": true}]}',
     "scatterers[1].alpha"),
])
def test_parse_errors_carry_path(doc, path):
    with pytest.raises(ConfigurationError) as info:
        load_configuration(doc)
    assert info.value.path == path
    assert str(info.value).startswith(path)


def test_duplicate_positions_document():
    doc = {"scatterers": [{"position": [1, 2, 3], "alpha": 0.1}, {"position": [1, 2, 3], "alpha": 0.2}]}
    with pytest.raises(CoincidentScatterersError, match="coincident scatterers"):
        load_configuration(json.dumps(doc))


def test_configuration_is_immutable():
    config = make_tetrahedron(1.0)
    with pytest.raises(AttributeError):
        config.scatterers = ()
    pos = config.positions
    pos[0, 0] = 99.0
    assert config.positions[0, 0] != 99.0
