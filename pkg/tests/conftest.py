import numpy as np
import pytest

from protforge.structure import Atom, ProteinStructure, infer_element


def make_atoms(positions, charges=None, radii=None, names=None):
    positions = np.asarray(positions, dtype=np.float64)
    n = len(positions)
    if charges is None:
        charges = np.ones(n)
    if radii is None:
        radii = np.full(n, 1.5)
    if names is None:
        names = ["CA"] * n
    return [
        Atom(
            serial=i + 1,
            name=names[i],
            residue_name="ALA",
            residue_seq=i + 1,
            position=positions[i],
            charge=float(charges[i]),
            radius=float(radii[i]),
            element=infer_element(names[i]),
        )
        for i in range(n)
    ]


def make_structure(positions, charges=None, radii=None, names=None, sid="test"):
    return ProteinStructure(
        atoms=tuple(make_atoms(positions, charges, radii, names)), id=sid
    )


def random_rotation(rng):
    """Haar-ish random rotation matrix from a QR decomposition."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
