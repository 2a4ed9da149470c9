"""PQR parsing and element-based atom selection.

A PQR file is whitespace-delimited; only ATOM/HETATM lines are records.
Each record carries tag, serial, atom name, residue name, residue number,
x, y, z, charge (e) and radius (Angstrom).  Files written with a chain-id
column (11 fields instead of 10) are detected by field count.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DuplicateSerialError,
    EmptySelectionError,
    EmptyStructureError,
    PQRParseError,
)


class Element(enum.Enum):
    C = "C"
    N = "N"
    O = "O"
    S = "S"
    H = "H"
    OTHER = "X"


class AtomSelector(enum.Enum):
    ALL_CARBON = "carbon"
    ALL_HEAVY = "heavy"
    ALL = "all"


HEAVY_ELEMENTS = frozenset({Element.C, Element.N, Element.O, Element.S})

_RECORD_TAGS = ("ATOM", "HETATM")


def infer_element(name: str) -> Element:
    """Element from an atom name: first alphabetic character after any
    leading digits (PDB2PQR names heavy atoms with a leading C/N/O/S/H)."""
    for ch in name:
        if ch.isalpha():
            ch = ch.upper()
            if ch in "CNOSH":
                return Element(ch)
            return Element.OTHER
    return Element.OTHER


@dataclass(frozen=True)
class Atom:
    serial: int
    name: str
    residue_name: str
    residue_seq: int
    position: np.ndarray  # (3,) float64, Angstrom
    charge: float  # elementary charge units
    radius: float  # Angstrom
    element: Element


@dataclass(frozen=True)
class ProteinStructure:
    atoms: tuple[Atom, ...]
    source_path: str = ""
    id: str = ""

    def __len__(self) -> int:
        return len(self.atoms)

    def positions(self) -> np.ndarray:
        return np.array([a.position for a in self.atoms], dtype=np.float64)

    def charges(self) -> np.ndarray:
        return np.array([a.charge for a in self.atoms], dtype=np.float64)

    def radii(self) -> np.ndarray:
        return np.array([a.radius for a in self.atoms], dtype=np.float64)


def _float_field(token: str, what: str, line_number: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise PQRParseError(f"bad {what} field {token!r}", line_number) from None
    if not math.isfinite(value):
        raise PQRParseError(f"non-finite {what} field {token!r}", line_number)
    return value


def _int_field(token: str, what: str, line_number: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise PQRParseError(f"bad {what} field {token!r}", line_number) from None


def parse_pqr(source, source_path: str = "", structure_id: str = "") -> ProteinStructure:
    """Parse PQR text (str, bytes or a file-like) into a ProteinStructure.

    Non-record lines (REMARK, TER, END, ...) are skipped.  HETATM records
    are parsed identically to ATOM.  Raises PQRParseError with the line
    number on malformed fields, EmptyStructureError when no record is
    found, and DuplicateSerialError on repeated serials.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8", errors="replace")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8", errors="replace")

    atoms: list[Atom] = []
    seen_serials: set[int] = set()
    for line_number, line in enumerate(io.StringIO(text), start=1):
        parts = line.split()
        if not parts or parts[0] not in _RECORD_TAGS:
            continue
        if len(parts) == 10:
            _, serial_s, name, res_name, res_seq_s = parts[:5]
            numeric = parts[5:]
        elif len(parts) == 11:
            # chain-id column sits between residue_name and residue_seq
            _, serial_s, name, res_name, _chain, res_seq_s = parts[:6]
            numeric = parts[6:]
        else:
            raise PQRParseError(
                f"expected 10 or 11 fields, got {len(parts)}", line_number
            )
        serial = _int_field(serial_s, "serial", line_number)
        if serial in seen_serials:
            raise DuplicateSerialError(
                f"line {line_number}: duplicate atom serial {serial}"
            )
        seen_serials.add(serial)
        res_seq = _int_field(res_seq_s, "residue_seq", line_number)
        x = _float_field(numeric[0], "x", line_number)
        y = _float_field(numeric[1], "y", line_number)
        z = _float_field(numeric[2], "z", line_number)
        charge = _float_field(numeric[3], "charge", line_number)
        radius = _float_field(numeric[4], "radius", line_number)
        if radius < 0:
            raise PQRParseError(f"negative radius {radius}", line_number)
        atoms.append(
            Atom(
                serial=serial,
                name=name,
                residue_name=res_name,
                residue_seq=res_seq,
                position=np.array([x, y, z], dtype=np.float64),
                charge=charge,
                radius=radius,
                element=infer_element(name),
            )
        )

    if not atoms:
        raise EmptyStructureError(f"no ATOM/HETATM records in {source_path or 'input'}")
    return ProteinStructure(atoms=tuple(atoms), source_path=source_path, id=structure_id)


def format_pqr(structure: ProteinStructure) -> str:
    """Serialize the atom records back to PQR text.

    Floats are written with full precision so parse -> format -> parse is
    an exact numeric round trip.
    """
    lines = []
    for a in structure.atoms:
        x, y, z = (float(v) for v in a.position)
        lines.append(
            f"ATOM {a.serial} {a.name} {a.residue_name} {a.residue_seq} "
            f"{x!r} {y!r} {z!r} {float(a.charge)!r} {float(a.radius)!r}"
        )
    return "\n".join(lines) + "\n"


def select_atoms(structure: ProteinStructure, selector: AtomSelector) -> np.ndarray:
    """Positions (m, 3) of the atoms matching the selector, in file order.

    ALL_CARBON keeps carbons, ALL_HEAVY keeps {C, N, O, S}, ALL keeps
    everything.  Raises EmptySelectionError when nothing matches.
    """
    if selector is AtomSelector.ALL_CARBON:
        picked = [a for a in structure.atoms if a.element is Element.C]
    elif selector is AtomSelector.ALL_HEAVY:
        picked = [a for a in structure.atoms if a.element in HEAVY_ELEMENTS]
    elif selector is AtomSelector.ALL:
        picked = list(structure.atoms)
    else:
        raise ValueError(f"unknown selector {selector!r}")
    if not picked:
        raise EmptySelectionError(
            f"selector {selector.value!r} matched no atoms in "
            f"{structure.id or structure.source_path or 'structure'}"
        )
    return np.array([a.position for a in picked], dtype=np.float64)
