"""Vietoris-Rips persistent homology by boundary-matrix reduction over Z/2.

A simplex enters the filtration at its diameter (max pairwise vertex
distance).  Columns of the boundary matrix are stored as integer bitmasks,
reduced left to right; pivot pairs give finite bars and unpaired positive
simplices give infinite bars.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.spatial.distance import squareform, pdist

from .errors import CapacityError, DuplicatePointError
from .structure import AtomSelector, ProteinStructure, select_atoms

DEFAULT_SIMPLEX_CAP = 50_000_000

INFINITE_DEATH = math.inf


@dataclass(frozen=True)
class Simplex:
    vertices: tuple[int, ...]  # sorted
    filtration_value: float  # Angstrom; 0 for vertices

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


@dataclass
class Filtration:
    simplices: list[Simplex]  # sorted by (value, dim, vertex tuple)
    max_scale: float
    max_dim: int
    n_points: int


@dataclass
class Barcode:
    dim: int
    bars: list[tuple[float, float]]  # (birth, death); math.inf for essential

    def finite(self) -> list[tuple[float, float]]:
        return [b for b in self.bars if math.isfinite(b[1])]


def build_rips_filtration(
    points,
    max_scale: float,
    max_dim: int,
    simplex_cap: int = DEFAULT_SIMPLEX_CAP,
) -> Filtration:
    """Enumerate all simplices of dimension <= max_dim with diameter
    <= max_scale.

    max_dim is capped at 3 (3-simplices are what kill 2-cycles; higher
    homology is out of scope).  Raises DuplicatePointError on coincident
    points and CapacityError when the enumeration exceeds simplex_cap.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected an (n, 3) point array, got shape {pts.shape}")
    if not 1 <= max_dim <= 3:
        raise ValueError(f"max_dim must be in [1, 3], got {max_dim}")
    if max_scale <= 0:
        raise ValueError(f"max_scale must be > 0, got {max_scale}")
    n = len(pts)
    if n == 0:
        raise ValueError("empty point cloud")

    dist = squareform(pdist(pts)) if n > 1 else np.zeros((1, 1))
    if n > 1:
        off_diag = dist[np.triu_indices(n, k=1)]
        if off_diag.min() == 0.0:
            i, j = np.argwhere(
                (dist == 0.0) & ~np.eye(n, dtype=bool)
            )[0]
            raise DuplicatePointError(f"points {i} and {j} coincide")

    adj = (dist <= max_scale) & ~np.eye(n, dtype=bool)

    simplices = [Simplex((v,), 0.0) for v in range(n)]
    count = n
    if count > simplex_cap:
        raise CapacityError(_cap_message(count, simplex_cap))

    edges: list[tuple[int, int]] = []
    for i, j in zip(*np.nonzero(np.triu(adj, k=1))):
        i, j = int(i), int(j)
        edges.append((i, j))
        simplices.append(Simplex((i, j), float(dist[i, j])))
    count += len(edges)
    if count > simplex_cap:
        raise CapacityError(_cap_message(count, simplex_cap))

    triangles: list[tuple[int, int, int]] = []
    if max_dim >= 2:
        for i, j in edges:
            common = np.nonzero(adj[i] & adj[j])[0]
            for k in common[common > j]:
                k = int(k)
                triangles.append((i, j, k))
                value = max(dist[i, j], dist[i, k], dist[j, k])
                simplices.append(Simplex((i, j, k), float(value)))
                count += 1
                if count > simplex_cap:
                    raise CapacityError(_cap_message(count, simplex_cap))

    if max_dim >= 3:
        for i, j, k in triangles:
            common = np.nonzero(adj[i] & adj[j] & adj[k])[0]
            for l in common[common > k]:
                l = int(l)
                value = max(
                    dist[i, j], dist[i, k], dist[i, l],
                    dist[j, k], dist[j, l], dist[k, l],
                )
                simplices.append(Simplex((i, j, k, l), float(value)))
                count += 1
                if count > simplex_cap:
                    raise CapacityError(_cap_message(count, simplex_cap))

    simplices.sort(key=lambda s: (s.filtration_value, s.dim, s.vertices))
    return Filtration(
        simplices=simplices, max_scale=max_scale, max_dim=max_dim, n_points=n
    )


def _cap_message(count: int, cap: int) -> str:
    return (
        f"simplex count exceeded the cap ({count} > {cap}); "
        "reduce max_scale or subsample the point cloud"
    )


def _boundary_columns(filtration: Filtration) -> list[int]:
    """Column bitmasks of the boundary matrix in filtration order."""
    position = {s.vertices: i for i, s in enumerate(filtration.simplices)}
    cols = []
    for s in filtration.simplices:
        mask = 0
        if s.dim > 0:
            for face in combinations(s.vertices, s.dim):
                mask |= 1 << position[face]
        cols.append(mask)
    return cols


def _reduce_plain(cols: list[int]) -> tuple[dict[int, int], list[int]]:
    """Left-to-right column reduction; returns {pivot row: column} and the
    reduced columns."""
    pivot: dict[int, int] = {}
    for j in range(len(cols)):
        col = cols[j]
        while col:
            low = col.bit_length() - 1
            other = pivot.get(low)
            if other is None:
                pivot[low] = j
                break
            col ^= cols[other]
        cols[j] = col
    return pivot, cols


def _reduce_clearing(
    cols: list[int], dims: list[int], max_dim: int
) -> tuple[dict[int, int], list[int]]:
    """Reduction with clearing: columns of simplices already identified as
    creators (pivot rows of one dimension up) are skipped, since they must
    reduce to zero.  Produces the same pivot pairs as the plain reduction."""
    pivot: dict[int, int] = {}
    cleared: set[int] = set()
    by_dim: dict[int, list[int]] = {}
    for j, d in enumerate(dims):
        by_dim.setdefault(d, []).append(j)
    for d in range(max_dim, 0, -1):
        for j in by_dim.get(d, []):
            if j in cleared:
                cols[j] = 0
                continue
            col = cols[j]
            while col:
                low = col.bit_length() - 1
                other = pivot.get(low)
                if other is None:
                    pivot[low] = j
                    cleared.add(low)
                    break
                col ^= cols[other]
            cols[j] = col
    return pivot, cols


def reduce_and_extract(
    filtration: Filtration,
    include_top_dim: bool = False,
    use_clearing: bool = True,
) -> list[Barcode]:
    """Barcodes for dimensions 0 .. max_dim-1 (all of max_dim's classes are
    essential, pass include_top_dim=True to get them too).

    Pivot pairs (i, j) give bars [value(i), value(j)] in dimension dim(i);
    unpaired positive simplices give infinite bars; zero-length bars are
    discarded.
    """
    simplices = filtration.simplices
    cols = _boundary_columns(filtration)
    dims = [s.dim for s in simplices]
    if use_clearing:
        pivot, cols = _reduce_clearing(cols, dims, filtration.max_dim)
    else:
        pivot, cols = _reduce_plain(cols)

    top = filtration.max_dim if include_top_dim else filtration.max_dim - 1
    bars: dict[int, list[tuple[float, float]]] = {d: [] for d in range(top + 1)}
    killed = set(pivot)
    for i, j in pivot.items():
        birth = simplices[i].filtration_value
        death = simplices[j].filtration_value
        if birth == death:
            continue
        d = simplices[i].dim
        if d <= top:
            bars[d].append((birth, death))
    for i, s in enumerate(simplices):
        if cols[i] == 0 and i not in killed and s.dim <= top:
            bars[s.dim].append((s.filtration_value, INFINITE_DEATH))
    return [Barcode(dim=d, bars=sorted(bars[d])) for d in range(top + 1)]


def barcode_for_selection(
    structure: ProteinStructure,
    selector: AtomSelector,
    max_scale: float,
    max_dim: int,
    simplex_cap: int = DEFAULT_SIMPLEX_CAP,
) -> list[Barcode]:
    """select_atoms -> build_rips_filtration -> reduce_and_extract."""
    points = select_atoms(structure, selector)
    filtration = build_rips_filtration(points, max_scale, max_dim, simplex_cap)
    return reduce_and_extract(filtration)


def barcodes_to_json(barcodes: list[Barcode]) -> str:
    """JSON document: one {dim, bars} object per dimension, null death
    encoding infinity."""
    doc = [
        {
            "dim": bc.dim,
            "bars": [
                [b, None if math.isinf(d) else d] for b, d in bc.bars
            ],
        }
        for bc in barcodes
    ]
    return json.dumps(doc, indent=2)


def barcodes_from_json(text: str) -> list[Barcode]:
    doc = json.loads(text)
    return [
        Barcode(
            dim=entry["dim"],
            bars=[
                (b, INFINITE_DEATH if d is None else d)
                for b, d in entry["bars"]
            ],
        )
        for entry in doc
    ]
