import json
import math

import numpy as np
import pytest

from protforge.errors import CapacityError, DuplicatePointError, EmptySelectionError
from protforge.rips import (
    Barcode,
    barcode_for_selection,
    barcodes_from_json,
    barcodes_to_json,
    build_rips_filtration,
    reduce_and_extract,
)
from protforge.structure import AtomSelector

from conftest import make_structure, random_rotation
from oracle_ph import (
    bars_alive_count,
    critical_values,
    enumerate_simplices,
    persistent_betti,
)

SQRT2 = math.sqrt(2.0)

SQUARE = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], dtype=float)
OCTAHEDRON = np.array(
    [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
    dtype=float,
)


# --------------------------------------------------------------------------
# filtration construction


def test_two_points():
    f = build_rips_filtration(np.array([[0, 0, 0], [0, 0, 2.5]]), 10.0, 1)
    assert len(f.simplices) == 3
    assert [s.dim for s in f.simplices] == [0, 0, 1]
    assert f.simplices[2].filtration_value == pytest.approx(2.5)


def test_edge_beyond_scale_excluded():
    f = build_rips_filtration(np.array([[0, 0, 0], [0, 0, 2.5]]), 2.0, 1)
    assert len(f.simplices) == 2


def test_equilateral_triangle():
    s = 2.0
    pts = np.array([[0, 0, 0], [s, 0, 0], [s / 2, s * math.sqrt(3) / 2, 0]])
    f = build_rips_filtration(pts, 5.0, 2)
    dims = [sp.dim for sp in f.simplices]
    assert dims.count(0) == 3 and dims.count(1) == 3 and dims.count(2) == 1
    triangle = f.simplices[-1]
    assert triangle.dim == 2
    assert triangle.filtration_value == pytest.approx(s)


def test_octahedron_simplex_census():
    f = build_rips_filtration(OCTAHEDRON, 3.0, 3)
    by_dim_value = {}
    for s in f.simplices:
        by_dim_value.setdefault(s.dim, []).append(s.filtration_value)
    assert len(by_dim_value[0]) == 6
    edges = np.array(by_dim_value[1])
    assert np.count_nonzero(np.isclose(edges, SQRT2)) == 12
    assert np.count_nonzero(np.isclose(edges, 2.0)) == 3
    tris = np.array(by_dim_value[2])
    assert len(tris) == 20
    assert np.count_nonzero(np.isclose(tris, SQRT2)) == 8
    assert np.count_nonzero(np.isclose(tris, 2.0)) == 12
    tets = np.array(by_dim_value[3])
    assert len(tets) == 15 and np.allclose(tets, 2.0)


def test_faces_precede_cofaces():
    f = build_rips_filtration(SQUARE, 3.0, 3)
    seen = set()
    from itertools import combinations

    for s in f.simplices:
        for face in combinations(s.vertices, len(s.vertices) - 1):
            if face:
                assert face in seen
        seen.add(s.vertices)


def test_duplicate_points_rejected():
    with pytest.raises(DuplicatePointError):
        build_rips_filtration(np.array([[0, 0, 0], [1, 0, 0], [0, 0, 0]]), 2.0, 1)


def test_capacity_error():
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 1, size=(20, 3))
    with pytest.raises(CapacityError, match="max_scale"):
        build_rips_filtration(pts, 5.0, 3, simplex_cap=100)


def test_bad_arguments():
    pts = np.array([[0, 0, 0], [1, 0, 0]])
    with pytest.raises(ValueError):
        build_rips_filtration(pts, 2.0, 4)
    with pytest.raises(ValueError):
        build_rips_filtration(pts, -1.0, 2)


# --------------------------------------------------------------------------
# reduction on canonical clouds


def test_two_points_barcode():
    f = build_rips_filtration(np.array([[0, 0, 0], [3, 0, 0]]), 10.0, 2)
    h0, h1 = reduce_and_extract(f)
    assert h0.bars == [(0.0, 3.0), (0.0, math.inf)]
    assert h1.bars == []


def test_square_h1():
    f = build_rips_filtration(SQUARE, 3.0, 2)
    h0, h1 = reduce_and_extract(f)
    assert len(h0.bars) == 4
    assert sum(1 for _, d in h0.bars if math.isinf(d)) == 1
    assert h1.bars == [(1.0, pytest.approx(SQRT2))]


def test_octahedron_h2():
    f = build_rips_filtration(OCTAHEDRON, 3.0, 3)
    h0, h1, h2 = reduce_and_extract(f)
    assert h1.bars == []
    assert len(h2.bars) == 1
    birth, death = h2.bars[0]
    assert birth == pytest.approx(SQRT2)
    assert death == pytest.approx(2.0)


def test_h0_has_n_bars_one_infinite(rng):
    pts = rng.uniform(0, 5, size=(9, 3))
    f = build_rips_filtration(pts, 20.0, 2)
    h0 = reduce_and_extract(f)[0]
    assert len(h0.bars) == 9
    assert sum(1 for _, d in h0.bars if math.isinf(d)) == 1


def test_clearing_matches_plain_reduction(rng):
    for _ in range(10):
        pts = rng.uniform(0, 2, size=(rng.integers(4, 10), 3))
        f = build_rips_filtration(pts, 5.0, 3)
        with_clearing = reduce_and_extract(f, include_top_dim=True, use_clearing=True)
        plain = reduce_and_extract(f, include_top_dim=True, use_clearing=False)
        assert [bc.bars for bc in with_clearing] == [bc.bars for bc in plain]


def test_bar_endpoints_are_pairwise_distances(rng):
    pts = rng.uniform(0, 3, size=(10, 3))
    from scipy.spatial.distance import pdist

    dists = set(np.round(pdist(pts), 9).tolist()) | {0.0}
    f = build_rips_filtration(pts, 10.0, 3)
    for bc in reduce_and_extract(f):
        for b, d in bc.bars:
            assert round(b, 9) in dists
            if math.isfinite(d):
                assert round(d, 9) in dists


def test_rigid_motion_and_permutation_invariance(rng):
    pts = rng.uniform(0, 3, size=(8, 3))
    f = build_rips_filtration(pts, 10.0, 2)
    base = [bc.bars for bc in reduce_and_extract(f)]
    rot = random_rotation(rng)
    moved = pts @ rot.T + np.array([4.0, -1.0, 2.0])
    perm = rng.permutation(len(pts))
    f2 = build_rips_filtration(moved[perm], 10.0, 2)
    other = [bc.bars for bc in reduce_and_extract(f2)]
    for b1, b2 in zip(base, other):
        assert len(b1) == len(b2)
        for (x1, y1), (x2, y2) in zip(sorted(b1), sorted(b2)):
            assert x1 == pytest.approx(x2, abs=1e-9)
            if math.isinf(y1):
                assert math.isinf(y2)
            else:
                assert y1 == pytest.approx(y2, abs=1e-9)


# --------------------------------------------------------------------------
# rank-based oracle


def assert_matches_rank_oracle(pts, max_dim=3, max_scale=None):
    pts = np.asarray(pts, dtype=float)
    if max_scale is None:
        max_scale = 10.0 * (1.0 + np.abs(pts).max())
    f = build_rips_filtration(pts, max_scale, max_dim)
    barcodes = reduce_and_extract(f, include_top_dim=True)
    table, _ = enumerate_simplices(pts, max_dim, max_scale)
    values = critical_values(table)
    for k in range(max_dim):
        bars = barcodes[k].bars
        for si, s in enumerate(values):
            for t in values[si:]:
                expected = persistent_betti(table, k, s, t, max_dim)
                assert bars_alive_count(bars, s, t) == expected, (
                    f"dim {k}, window ({s}, {t})"
                )


def test_oracle_on_canonical_clouds():
    assert_matches_rank_oracle(np.array([[0, 0, 0], [2, 0, 0]]), max_dim=2)
    assert_matches_rank_oracle(SQUARE)
    assert_matches_rank_oracle(OCTAHEDRON)


def test_oracle_on_random_clouds(rng):
    for _ in range(8):
        n = int(rng.integers(4, 9))
        pts = rng.uniform(0, 2, size=(n, 3))
        assert_matches_rank_oracle(pts)


def test_euler_characteristic_identity(rng):
    for _ in range(10):
        n = int(rng.integers(4, 12))
        pts = rng.uniform(0, 2, size=(n, 3))
        f = build_rips_filtration(pts, 10.0, 3)
        barcodes = reduce_and_extract(f, include_top_dim=True)
        chi_simplices = 0
        for s in f.simplices:
            chi_simplices += (-1) ** s.dim
        chi_bars = 0
        for bc in barcodes:
            alive = sum(1 for _, d in bc.bars if math.isinf(d))
            chi_bars += (-1) ** bc.dim * alive
        assert chi_simplices == chi_bars


# --------------------------------------------------------------------------
# structure-level composition and JSON


def test_single_carbon():
    s = make_structure([[0, 0, 0]], names=["CA"])
    bcs = barcode_for_selection(s, AtomSelector.ALL_CARBON, 50.0, 3)
    assert bcs[0].bars == [(0.0, math.inf)]
    assert bcs[1].bars == [] and bcs[2].bars == []


def test_square_structure_h1():
    s = make_structure(SQUARE, names=["CA"] * 4)
    bcs = barcode_for_selection(s, AtomSelector.ALL_CARBON, 50.0, 2)
    assert bcs[1].bars == [(1.0, pytest.approx(SQRT2))]


def test_heavy_two_atom_structure():
    s = make_structure([[0, 0, 0], [3.0, 0, 0]], names=["CA", "O"])
    bcs = barcode_for_selection(s, AtomSelector.ALL_HEAVY, 50.0, 2)
    assert bcs[0].bars == [(0.0, 3.0), (0.0, math.inf)]


def test_selection_error_propagates():
    s = make_structure([[0, 0, 0]], names=["1HB"])
    with pytest.raises(EmptySelectionError):
        barcode_for_selection(s, AtomSelector.ALL_CARBON, 50.0, 2)


def test_json_round_trip():
    bcs = [
        Barcode(dim=1, bars=[(1.0, SQRT2)]),
        Barcode(dim=2, bars=[(SQRT2, math.inf)]),
    ]
    text = barcodes_to_json(bcs)
    doc = json.loads(text)
    assert doc[0]["bars"] == [[1.0, SQRT2]]
    assert doc[1]["bars"][0][1] is None
    back = barcodes_from_json(text)
    assert back[0].bars == bcs[0].bars
    assert back[1].bars == bcs[1].bars
