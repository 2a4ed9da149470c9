"""Generalized Born energy formulas: single-sphere Born solvation, the
pairwise GB sum with the f_GB effective interaction distance, and the
perfect-Born-radius inversion.

Library capability only: no features are derived from these in v1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import CountMismatchError
from .structure import Atom


@dataclass(frozen=True)
class GBContext:
    eps1: float  # solute dielectric
    eps2: float  # solvent dielectric
    born_radii: np.ndarray  # (N,) effective Born radii, Angstrom
    unit_constant: float = 1.0

    def __post_init__(self):
        if self.eps1 <= 0 or self.eps2 <= 0:
            raise ValueError(
                f"dielectrics must be > 0, got eps1={self.eps1}, eps2={self.eps2}"
            )
        radii = np.asarray(self.born_radii, dtype=np.float64)
        if radii.size and radii.min() <= 0:
            raise ValueError("every Born radius must be > 0")
        object.__setattr__(self, "born_radii", radii)


def born_sphere_energy(
    q: float, a: float, eps1: float, eps2: float, unit_constant: float = 1.0
) -> float:
    """Solvation energy of a single charge q centered in a sphere of
    radius a: C_e (1/eps2 - 1/eps1) q^2 / (2a)."""
    if a <= 0:
        raise ValueError(f"sphere radius must be > 0, got {a}")
    if eps1 <= 0 or eps2 <= 0:
        raise ValueError(f"dielectrics must be > 0, got {eps1}, {eps2}")
    return unit_constant * (1.0 / eps2 - 1.0 / eps1) * q * q / (2.0 * a)


def f_gb(r: float, Ri: float, Rj: float) -> float:
    """Effective interaction distance
    f_GB(r) = sqrt(r^2 + Ri Rj exp(-r^2 / (4 Ri Rj))).

    Equals sqrt(Ri Rj) at r = 0 and approaches r for r >> sqrt(Ri Rj).
    """
    if Ri <= 0 or Rj <= 0:
        raise ValueError(f"Born radii must be > 0, got {Ri}, {Rj}")
    if r < 0:
        raise ValueError(f"distance must be >= 0, got {r}")
    rr = Ri * Rj
    return float(np.sqrt(r * r + rr * np.exp(-r * r / (4.0 * rr))))


def gb_solvation_energy(atoms: list[Atom], ctx: GBContext) -> float:
    """E_solv ~= (C_e/2)(1/eps2 - 1/eps1) sum_i sum_j q_i q_j / f_ij.

    The double sum runs over all ordered pairs including i = j, where
    f_ii = R_i (the r = 0 limit of f_GB), so a single atom reduces exactly
    to the Born sphere energy.
    """
    if len(ctx.born_radii) != len(atoms):
        raise CountMismatchError(
            f"{len(ctx.born_radii)} Born radii for {len(atoms)} atoms"
        )
    charges = np.array([a.charge for a in atoms], dtype=np.float64)
    positions = np.array([a.position for a in atoms], dtype=np.float64)
    n = len(atoms)
    r = squareform(pdist(positions)) if n > 1 else np.zeros((1, 1))
    rr = np.outer(ctx.born_radii, ctx.born_radii)
    f = np.sqrt(r * r + rr * np.exp(-(r * r) / (4.0 * rr)))
    total = float(charges @ (charges / f).sum(axis=1))
    return 0.5 * ctx.unit_constant * (1.0 / ctx.eps2 - 1.0 / ctx.eps1) * total


def born_self_energies(atoms: list[Atom], ctx: GBContext) -> np.ndarray:
    """Per-atom diagonal (Born) contributions of the GB double sum."""
    if len(ctx.born_radii) != len(atoms):
        raise CountMismatchError(
            f"{len(ctx.born_radii)} Born radii for {len(atoms)} atoms"
        )
    charges = np.array([a.charge for a in atoms], dtype=np.float64)
    factor = 0.5 * ctx.unit_constant * (1.0 / ctx.eps2 - 1.0 / ctx.eps1)
    return factor * charges * charges / ctx.born_radii


def perfect_born_radius(
    q: float, E_pb_single: float, eps1: float, eps2: float,
    unit_constant: float = 1.0,
) -> float:
    """Radius making the Born sphere formula reproduce a given single-atom
    PB solvation energy: R = C_e (1/eps2 - 1/eps1) q^2 / (2 E)."""
    if eps1 <= 0 or eps2 <= 0:
        raise ValueError(f"dielectrics must be > 0, got {eps1}, {eps2}")
    if E_pb_single == 0:
        raise ValueError("zero solvation energy has no Born radius")
    return unit_constant * (1.0 / eps2 - 1.0 / eps1) * q * q / (2.0 * E_pb_single)
