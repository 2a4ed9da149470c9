"""Octree of cubic clusters with Cartesian multipole moments, plus Coulomb
energy by direct summation and by particle-cluster treecode.

The tree is a complete (non-adaptive) octree: every cluster above the
bottom level has exactly 8 children and empty clusters are kept with zero
moments, so the flattened moment vector has the same length for every
structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.spatial.distance import pdist

from .errors import SingularPairError
from .structure import Atom

# converts e^2/Angstrom to kcal/mol; internal unit constant is 1.0
KCAL_PER_MOL = 332.0716

_SQRT3 = math.sqrt(3.0)

# member counts below this are summed directly: the expansion is neither
# cheaper nor more accurate there, and two-body systems stay exact
DEFAULT_MIN_CLUSTER_ATOMS = 3


def n_terms(p: int) -> int:
    """Number of multi-indices with |k| <= p (tetrahedral numbers)."""
    if p < 0:
        raise ValueError(f"expansion order must be >= 0, got {p}")
    return (p + 1) * (p + 2) * (p + 3) // 6


@lru_cache(maxsize=None)
def multi_indices(p: int) -> tuple[tuple[int, int, int], ...]:
    """All (k1, k2, k3) with k1+k2+k3 <= p in graded lexicographic order:
    ascending |k|, then lexicographic on the tuple."""
    if p < 0:
        raise ValueError(f"expansion order must be >= 0, got {p}")
    out = []
    for total in range(p + 1):
        for k1 in range(total + 1):
            for k2 in range(total - k1 + 1):
                out.append((k1, k2, total - k1 - k2))
    return tuple(out)


@dataclass
class Cluster:
    level: int
    center: np.ndarray  # (3,)
    half_width: float  # Angstrom
    member_indices: np.ndarray  # int64 indices into the atom list
    moments: np.ndarray | None = None  # (n_terms(p),) e * A^|k|
    children: list["Cluster"] = field(default_factory=list)

    @property
    def half_diagonal(self) -> float:
        return _SQRT3 * self.half_width

    @property
    def n_members(self) -> int:
        return int(self.member_indices.size)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class ClusterTree:
    root: Cluster
    levels: int  # L
    expansion_order: int  # p
    positions: np.ndarray  # (N, 3)
    charges: np.ndarray  # (N,)
    level_clusters: list[list[Cluster]]  # per level, in octant-path order

    @property
    def n_clusters(self) -> int:
        return sum(len(level) for level in self.level_clusters)


def _root_box(positions: np.ndarray) -> tuple[np.ndarray, float]:
    lo = positions.min(axis=0)
    hi = positions.max(axis=0)
    center = 0.5 * (lo + hi)
    half_width = 0.5 * float((hi - lo).max())
    # inflate 0.5% so no atom sits exactly on the root boundary
    return center, half_width * 1.005


def _split_members(positions, members, center):
    """Partition member indices into the 8 octants.  Bit 0/1/2 set means
    x/y/z >= center (boundary atoms go to the greater-coordinate child)."""
    pts = positions[members]
    codes = (
        (pts[:, 0] >= center[0]).astype(np.int64)
        | ((pts[:, 1] >= center[1]).astype(np.int64) << 1)
        | ((pts[:, 2] >= center[2]).astype(np.int64) << 2)
    )
    return [members[codes == code] for code in range(8)]

_OCTANT_SIGNS = np.array(
    [[1 if code >> axis & 1 else -1 for axis in range(3)] for code in range(8)],
    dtype=np.float64,
)


def _cluster_moments(positions, charges, members, center, p) -> np.ndarray:
    idx = multi_indices(p)
    if members.size == 0:
        return np.zeros(len(idx))
    dx = positions[members] - center  # (m, 3)
    pows = np.ones((members.size, p + 1, 3))
    for e in range(1, p + 1):
        pows[:, e, :] = pows[:, e - 1, :] * dx
    k = np.array(idx)  # (n_terms, 3)
    monomials = pows[:, k[:, 0], 0] * pows[:, k[:, 1], 1] * pows[:, k[:, 2], 2]
    return charges[members] @ monomials


def build_tree(atoms: list[Atom], L: int, p: int) -> ClusterTree:
    """Build the complete octree down to level L and attach per-cluster
    moments M^k = sum_j q_j (x_j - x_c)^k for |k| <= p, computed directly
    from the member particles at every level.

    The root cube is the tight bounding box expanded to a cube about the
    box center and inflated by 0.5%.
    """
    if not atoms:
        raise ValueError("cannot build a cluster tree from an empty atom list")
    if L < 0:
        raise ValueError(f"tree depth must be >= 0, got {L}")
    if p < 0:
        raise ValueError(f"expansion order must be >= 0, got {p}")

    positions = np.array([a.position for a in atoms], dtype=np.float64)
    charges = np.array([a.charge for a in atoms], dtype=np.float64)
    return _build_tree_from_arrays(positions, charges, L, p)


def _build_tree_from_arrays(positions, charges, L, p) -> ClusterTree:
    center, half_width = _root_box(positions)
    root = Cluster(
        level=0,
        center=center,
        half_width=half_width,
        member_indices=np.arange(len(positions), dtype=np.int64),
    )
    level_clusters = [[root]]
    for level in range(1, L + 1):
        next_level: list[Cluster] = []
        for parent in level_clusters[level - 1]:
            child_hw = parent.half_width * 0.5
            offsets = _OCTANT_SIGNS * child_hw
            parts = _split_members(positions, parent.member_indices, parent.center)
            for code in range(8):
                child = Cluster(
                    level=level,
                    center=parent.center + offsets[code],
                    half_width=child_hw,
                    member_indices=parts[code],
                )
                parent.children.append(child)
                next_level.append(child)
        level_clusters.append(next_level)

    for level in level_clusters:
        for cluster in level:
            cluster.moments = _cluster_moments(
                positions, charges, cluster.member_indices, cluster.center, p
            )
    return ClusterTree(
        root=root,
        levels=L,
        expansion_order=p,
        positions=positions,
        charges=charges,
        level_clusters=level_clusters,
    )


def moments_via_m2m(tree: ClusterTree) -> ClusterTree:
    """Recompute all non-leaf moments bottom-up from child moments via the
    binomial shift M_parent^k = sum_child sum_{m<=k} C(k,m) s^(k-m) M_child^m
    with s the child-to-parent center offset.  Returns the same tree."""
    p = tree.expansion_order
    idx = multi_indices(p)
    pos_of = {k: i for i, k in enumerate(idx)}
    comb = math.comb
    for level in range(tree.levels - 1, -1, -1):
        for parent in tree.level_clusters[level]:
            moments = np.zeros(len(idx))
            for child in parent.children:
                if child.n_members == 0:
                    continue
                s = child.center - parent.center
                spow = np.ones((p + 1, 3))
                for e in range(1, p + 1):
                    spow[e] = spow[e - 1] * s
                cm = child.moments
                for i, (k1, k2, k3) in enumerate(idx):
                    acc = 0.0
                    for m1 in range(k1 + 1):
                        c1 = comb(k1, m1) * spow[k1 - m1, 0]
                        for m2 in range(k2 + 1):
                            c12 = c1 * comb(k2, m2) * spow[k2 - m2, 1]
                            for m3 in range(k3 + 1):
                                acc += (
                                    c12
                                    * comb(k3, m3)
                                    * spow[k3 - m3, 2]
                                    * cm[pos_of[(m1, m2, m3)]]
                                )
                    moments[i] += acc
            parent.moments = moments
    return tree


def _check_no_coincident(positions: np.ndarray) -> None:
    if len(positions) < 2:
        return
    d = pdist(positions)
    if d.min() > 0.0:
        return
    n = len(positions)
    flat = int(np.argmin(d))
    # invert the condensed pdist index to the (i, j) pair
    i = 0
    offset = flat
    row = n - 1
    while offset >= row:
        offset -= row
        row -= 1
        i += 1
    raise SingularPairError(i, i + 1 + offset)


def coulomb_energy_direct(
    atoms: list[Atom], eps1: float, unit_constant: float = 1.0
) -> float:
    """E_coul = C_e * sum_{j<k} q_j q_k / (eps1 * r_jk) by direct summation."""
    if eps1 <= 0:
        raise ValueError(f"solute dielectric must be > 0, got {eps1}")
    positions = np.array([a.position for a in atoms], dtype=np.float64)
    charges = np.array([a.charge for a in atoms], dtype=np.float64)
    if len(atoms) < 2:
        return 0.0
    _check_no_coincident(positions)
    d = pdist(positions)
    iu, ju = np.triu_indices(len(atoms), k=1)
    return unit_constant * float(np.sum(charges[iu] * charges[ju] / d)) / eps1


@lru_cache(maxsize=None)
def _recurrence_plan(p: int):
    """Static plan for the Taylor-coefficient recurrence of 1/r: for each
    multi-index (beyond k=0) its |k|, the (axis, position) pairs for k-e_d,
    and the positions for k-2e_d."""
    idx = multi_indices(p)
    pos_of = {k: i for i, k in enumerate(idx)}
    plan = []
    for k in idx[1:]:
        order = sum(k)
        first = []
        second = []
        for d in range(3):
            if k[d] >= 1:
                km = list(k)
                km[d] -= 1
                first.append((d, pos_of[tuple(km)]))
            if k[d] >= 2:
                km = list(k)
                km[d] -= 2
                second.append(pos_of[tuple(km)])
        plan.append((order, tuple(first), tuple(second)))
    return tuple(plan)


def _taylor_coefficients(R: np.ndarray, r2: np.ndarray, p: int) -> np.ndarray:
    """Coefficients a^k = (1/k!) D_y^k (1/|x-y|) at the cluster centers,
    vectorized over clusters.  R is x - center (m, 3), r2 = |R|^2 (m,).

    Recurrence: |k| r^2 a^k = (2|k|-1) sum_d R_d a^(k-e_d)
                              - (|k|-1) sum_d a^(k-2e_d).
    """
    m = len(r2)
    coeffs = np.empty((n_terms(p), m))
    coeffs[0] = 1.0 / np.sqrt(r2)
    for i, (order, first, second) in enumerate(_recurrence_plan(p), start=1):
        acc = np.zeros(m)
        for d, pos in first:
            acc += R[:, d] * coeffs[pos]
        acc *= 2 * order - 1
        if second:
            low = np.zeros(m)
            for pos in second:
                low += coeffs[pos]
            acc -= (order - 1) * low
        coeffs[i] = acc / (order * r2)
    return coeffs


def _potential_at(tree, target, theta, min_cluster_atoms) -> float:
    """Coulomb potential (unit kernel 1/r) at atom `target` from all other
    atoms, approximating far clusters by their truncated Taylor series."""
    x = tree.positions[target]
    theta2 = theta * theta
    far: list[Cluster] = []
    near: list[np.ndarray] = []
    stack = [tree.root]
    while stack:
        c = stack.pop()
        if c.n_members == 0:
            continue
        dx = x - c.center
        r2 = float(dx @ dx)
        if (
            c.n_members >= min_cluster_atoms
            and r2 > 0.0
            and 3.0 * c.half_width * c.half_width <= theta2 * r2
        ):
            far.append(c)
        elif c.children:
            stack.extend(c.children)
        else:
            near.append(c.member_indices)

    phi = 0.0
    if far:
        centers = np.array([c.center for c in far])
        moments = np.array([c.moments for c in far])  # (m, n_terms)
        R = x - centers
        r2 = np.einsum("ij,ij->i", R, R)
        coeffs = _taylor_coefficients(R, r2, tree.expansion_order)
        phi += float(np.einsum("km,mk->", coeffs, moments))
    if near:
        members = np.concatenate(near)
        members = members[members != target]
        if members.size:
            d = np.linalg.norm(tree.positions[members] - x, axis=1)
            zero = np.nonzero(d == 0.0)[0]
            if zero.size:
                raise SingularPairError(target, int(members[zero[0]]))
            phi += float(np.sum(tree.charges[members] / d))
    return phi


def coulomb_energy_treecode(
    atoms: list[Atom],
    eps1: float,
    p: int,
    L: int,
    theta: float,
    unit_constant: float = 1.0,
    min_cluster_atoms: int = DEFAULT_MIN_CLUSTER_ATOMS,
    tree: ClusterTree | None = None,
) -> float:
    """Approximate E_coul = (1/2) sum_k q_k phi(x_k) with the particle-
    cluster treecode.

    A cluster is approximated when half_diagonal / |x - x_c| <= theta and
    it holds at least `min_cluster_atoms` sources; otherwise the recursion
    descends, falling back to direct sums at the leaves.  Self-interaction
    is excluded.
    """
    if eps1 <= 0:
        raise ValueError(f"solute dielectric must be > 0, got {eps1}")
    if not 0.0 < theta < 1.0:
        raise ValueError(f"multipole acceptance parameter must be in (0, 1), got {theta}")
    if tree is None:
        tree = build_tree(atoms, L, p)
    total = 0.0
    for k in range(len(tree.charges)):
        total += tree.charges[k] * _potential_at(tree, k, theta, min_cluster_atoms)
    return 0.5 * unit_constant * total / eps1
