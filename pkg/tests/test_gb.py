import math

import numpy as np
import pytest

from protforge.errors import CountMismatchError
from protforge.gb import (
    GBContext,
    born_self_energies,
    born_sphere_energy,
    f_gb,
    gb_solvation_energy,
    perfect_born_radius,
)

from conftest import make_atoms

# frozen by an independent scripted evaluation of the pairwise GB sum:
# q = (+1, -1), R1 = R2 = 2, r = 4, eps1 = 1, eps2 = 80, C_e = 1
TWO_ATOM_GB = -0.25750001629112995


# --------------------------------------------------------------------------
# born_sphere_energy


def test_born_sphere_hand_value():
    assert born_sphere_energy(1.0, 2.0, 1.0, 80.0) == pytest.approx(-0.246875)


def test_born_sphere_no_dielectric_jump():
    for q, a in ((1.0, 2.0), (-0.5, 0.7)):
        assert born_sphere_energy(q, a, 40.0, 40.0) == 0.0


def test_born_sphere_zero_charge():
    assert born_sphere_energy(0.0, 1.0, 1.0, 80.0) == 0.0


def test_born_sphere_bad_radius():
    with pytest.raises(ValueError):
        born_sphere_energy(1.0, 0.0, 1.0, 80.0)
    with pytest.raises(ValueError):
        born_sphere_energy(1.0, -1.0, 1.0, 80.0)


# --------------------------------------------------------------------------
# f_gb


def test_f_gb_at_zero_equal_radii():
    assert f_gb(0.0, 3.0, 3.0) == pytest.approx(3.0)


def test_f_gb_at_zero_geometric_mean():
    assert f_gb(0.0, 1.0, 4.0) == pytest.approx(2.0)


def test_f_gb_large_distance():
    assert f_gb(10.0, 1.0, 1.0) == pytest.approx(10.000000000000695, rel=1e-15)


def test_f_gb_bad_inputs():
    with pytest.raises(ValueError):
        f_gb(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        f_gb(-1.0, 1.0, 1.0)


def test_f_gb_monotone_in_r(rng):
    for _ in range(20):
        Ri, Rj = rng.uniform(0.5, 5.0, size=2)
        rs = np.sort(rng.uniform(0, 30, size=10))
        values = [f_gb(r, Ri, Rj) for r in rs]
        assert all(a < b for a, b in zip(values, values[1:]))


def test_f_gb_bounds(rng):
    for _ in range(50):
        Ri, Rj = rng.uniform(0.5, 5.0, size=2)
        r = float(rng.uniform(0, 20))
        f = f_gb(r, Ri, Rj)
        lower = max(r, math.sqrt(Ri * Rj) * math.exp(-r * r / (8 * Ri * Rj)))
        upper = math.sqrt(r * r + Ri * Rj)
        assert lower <= f <= upper + 1e-15


# --------------------------------------------------------------------------
# gb_solvation_energy


def test_single_atom_reduces_to_born_sphere():
    atoms = make_atoms([[0, 0, 0]], charges=[0.8])
    ctx = GBContext(eps1=1.0, eps2=80.0, born_radii=np.array([1.7]))
    assert gb_solvation_energy(atoms, ctx) == pytest.approx(
        born_sphere_energy(0.8, 1.7, 1.0, 80.0), rel=1e-14
    )


def test_zero_charge_partner_drops_out():
    atoms = make_atoms([[0, 0, 0], [3.0, 0, 0]], charges=[0.8, 0.0])
    ctx = GBContext(eps1=1.0, eps2=80.0, born_radii=np.array([1.7, 2.0]))
    assert gb_solvation_energy(atoms, ctx) == pytest.approx(
        born_sphere_energy(0.8, 1.7, 1.0, 80.0), rel=1e-14
    )


def test_two_atom_hand_case():
    atoms = make_atoms([[0, 0, 0], [4.0, 0, 0]], charges=[1.0, -1.0])
    ctx = GBContext(eps1=1.0, eps2=80.0, born_radii=np.array([2.0, 2.0]))
    assert gb_solvation_energy(atoms, ctx) == pytest.approx(TWO_ATOM_GB, rel=1e-14)


def test_radii_count_mismatch():
    atoms = make_atoms([[0, 0, 0], [4.0, 0, 0]])
    ctx = GBContext(eps1=1.0, eps2=80.0, born_radii=np.array([2.0]))
    with pytest.raises(CountMismatchError):
        gb_solvation_energy(atoms, ctx)


def test_context_validation():
    with pytest.raises(ValueError):
        GBContext(eps1=0.0, eps2=80.0, born_radii=np.array([1.0]))
    with pytest.raises(ValueError):
        GBContext(eps1=1.0, eps2=80.0, born_radii=np.array([0.0]))


def test_negative_when_solvent_more_polar(rng):
    for _ in range(10):
        n = int(rng.integers(2, 8))
        atoms = make_atoms(
            rng.uniform(0, 10, size=(n, 3)), charges=rng.uniform(-1, 1, size=n)
        )
        radii = rng.uniform(1.0, 3.0, size=n)
        ctx = GBContext(eps1=1.0, eps2=80.0, born_radii=radii)
        assert gb_solvation_energy(atoms, ctx) < 0
        # the 1/f kernel matrix is positive definite
        from scipy.spatial.distance import pdist, squareform

        r = squareform(pdist(np.array([a.position for a in atoms])))
        rr = np.outer(radii, radii)
        f = np.sqrt(r * r + rr * np.exp(-(r * r) / (4 * rr)))
        eigenvalues = np.linalg.eigvalsh(1.0 / f)
        assert eigenvalues.min() > 0


def test_born_self_terms_sum():
    atoms = make_atoms([[0, 0, 0], [4.0, 0, 0]], charges=[1.0, -1.0])
    ctx = GBContext(eps1=1.0, eps2=80.0, born_radii=np.array([2.0, 2.0]))
    terms = born_self_energies(atoms, ctx)
    expected = [born_sphere_energy(q, 2.0, 1.0, 80.0) for q in (1.0, -1.0)]
    assert np.allclose(terms, expected, rtol=1e-14)


# --------------------------------------------------------------------------
# perfect_born_radius


def test_round_trip_recovers_radius():
    e = born_sphere_energy(1.0, 2.0, 1.0, 80.0)
    assert perfect_born_radius(1.0, e, 1.0, 80.0) == pytest.approx(2.0, rel=1e-12)


def test_round_trip_general(rng):
    for _ in range(20):
        q = float(rng.uniform(-2, 2))
        if q == 0:
            continue
        a = float(rng.uniform(0.5, 4.0))
        eps1, eps2 = 2.0, 78.5
        e = born_sphere_energy(q, a, eps1, eps2)
        assert perfect_born_radius(q, e, eps1, eps2) == pytest.approx(a, rel=1e-12)


def test_zero_energy_rejected():
    with pytest.raises(ValueError):
        perfect_born_radius(0.0, 0.0, 1.0, 80.0)


def test_unit_constant_cancels_in_round_trip():
    c = 332.0716
    e = born_sphere_energy(1.3, 1.9, 1.0, 80.0, unit_constant=c)
    assert perfect_born_radius(1.3, e, 1.0, 80.0, unit_constant=c) == pytest.approx(
        1.9, rel=1e-12
    )
