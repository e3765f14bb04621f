import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bowtie_mbqc import lattice
from bowtie_mbqc.errors import ConfigurationError
from bowtie_mbqc.lattice import LatticeGraph, build_bowtie, custom_graph


def test_single_cell():
    g = build_bowtie(1, 1)
    assert len(g.sites) == 5
    assert len(g.triangles) == 2
    centre = lattice.bowtie_cell_sites(g)[0]
    assert all(centre in t for t in g.triangles)


@pytest.mark.parametrize("rows,cols", [(1, 2), (2, 1), (2, 2), (3, 4)])
def test_cells_share_vertices(rows, cols):
    g = build_bowtie(rows, cols)
    assert len(g.triangles) == 2 * rows * cols
    # every cell adds its centre plus at most four new vertices
    assert len(g.sites) < 5 * rows * cols


@pytest.mark.parametrize("rows,cols", [(1, 1), (2, 3)])
def test_triangles_are_equilateral(rows, cols):
    g = build_bowtie(rows, cols)
    xy = g.coords()
    for t in g.triangles:
        d = [math.dist(xy[a], xy[b]) for a, b in ((t[0], t[1]), (t[0], t[2]), (t[1], t[2]))]
        assert np.allclose(d, lattice.SITE_SPACING)


def test_bad_dimensions():
    with pytest.raises(ConfigurationError):
        build_bowtie(0, 2)


@pytest.mark.parametrize(
    "triangles,links",
    [
        ([(1, 2, 9)], []),
        ([(1, 2, 3), (3, 2, 1)], []),
        ([(1, 2, 3)], [(1, 2)]),
        ([], [(1, 1)]),
        ([], [(1, 2), (2, 1)]),
    ],
)
def test_custom_graph_validation(triangles, links):
    with pytest.raises(ConfigurationError):
        custom_graph([1, 2, 3, 4], triangles, links)


def test_graph_json_roundtrip():
    g = lattice.toffoli_graph()
    assert LatticeGraph.from_json(g.to_json()) == g


def test_toffoli_graph_shape():
    g = lattice.toffoli_graph()
    assert g.labels == list(range(1, 14))
    assert g.triangles == ((6, 8, 9),)
    assert len(g.links) == 10


def test_assignment_from_path():
    g = build_bowtie(1, 1)
    c, lo, la, ro, ra = lattice.bowtie_cell_sites(g)
    a = lattice.assignment_from_path(g, active={lo, c, ro}, bridge_ones={la})
    assert a[la] == "one" and a[ra] == "zero" and a[c] == "plus"
    with pytest.raises(ConfigurationError):
        lattice.assignment_from_path(g, active={c}, bridge_ones={c})


def test_blurred_removal_takes_neighbourhood():
    g = build_bowtie(3, 3)
    xy = g.coords()
    centre = xy[lattice.bowtie_cell_sites(g, 1, 1)[0]]
    removed = lattice.blurred_removal(g, centre)
    assert len(removed) > 1
    assert all(math.dist(xy[s], centre) <= lattice.BEAM_WAIST + 1e-12 for s in removed)


def test_potential_origin_value():
    f = lattice.potential_map(V1=0.7, V2=1.3, resolution=5)
    assert np.isclose(f.V[0, 0], 2 * 1.3)


@given(st.floats(0, 5), st.floats(0, 5), st.floats(-3, 3), st.floats(-3, 3))
def test_potential_bounds(v1, v2, x, y):
    v = lattice.offset_potential(x, y, v1, v2, 2.0)
    assert -1e-12 <= v <= 2 * (v1 + v2) + 1e-12


def test_potential_periods():
    # period lambda along y and lambda / sqrt(3) along x
    x, y, lam = 0.37, 0.81, 2.0
    v = lattice.offset_potential(x, y, 1.0, 0.5, lam)
    assert np.isclose(v, lattice.offset_potential(x, y + lam, 1.0, 0.5, lam))
    assert np.isclose(v, lattice.offset_potential(x + lam / math.sqrt(3), y, 1.0, 0.5, lam))


@pytest.mark.parametrize(
    "kwargs",
    [dict(resolution=1), dict(wavelength=0), dict(V1=-1), dict(x_range=(1, 1))],
)
def test_potential_map_rejects(kwargs):
    with pytest.raises(ConfigurationError):
        lattice.potential_map(**kwargs)


def test_pgm_output():
    f = lattice.potential_map(resolution=(6, 4))
    lines = f.to_pgm().splitlines()
    assert lines[:3] == ["P2", "6 4", "255"]
    vals = np.array([list(map(int, ln.split())) for ln in lines[3:]])
    assert vals.shape == (4, 6) and vals.min() == 0 and vals.max() == 255
    # first row is the largest y
    assert np.array_equal(vals[-1], np.rint((f.V[0] - f.V.min()) * 255 / np.ptp(f.V)).astype(int))


def test_csv_output():
    f = lattice.potential_map(resolution=3)
    lines = f.to_csv().splitlines()
    assert lines[0] == "x,y,V" and len(lines) == 10
