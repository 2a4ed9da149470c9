"""Binned birth/death/persistence channels from Betti-1 and Betti-2
barcodes of the carbon and heavy-atom point clouds.

Channel order is fixed: selector (carbon, heavy) x dimension (1, 2) x
kind (birth, death, persistence) -> 12 channels.  The filtration interval
[0, L_scale] splits into n uniform bins (defaults 50 A / 100 bins, i.e.
0.50 A per bin).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BinRangeError
from .rips import Barcode, barcode_for_selection, DEFAULT_SIMPLEX_CAP
from .structure import AtomSelector, ProteinStructure

DEFAULT_L_SCALE = 50.0
DEFAULT_N_BINS = 100


class BinKind(enum.Enum):
    BIRTH = "birth"
    DEATH = "death"
    PERSISTENCE = "persistence"


# canonical 12-channel order
CHANNEL_ORDER: tuple[tuple[AtomSelector, int, BinKind], ...] = tuple(
    (selector, dim, kind)
    for selector in (AtomSelector.ALL_CARBON, AtomSelector.ALL_HEAVY)
    for dim in (1, 2)
    for kind in (BinKind.BIRTH, BinKind.DEATH, BinKind.PERSISTENCE)
)


def channel_names() -> list[str]:
    return [
        f"{sel.value}-H{dim}-{kind.value}" for sel, dim, kind in CHANNEL_ORDER
    ]


@dataclass(frozen=True)
class BinnedChannel:
    kind: BinKind
    atom_selector: AtomSelector
    dim: int
    counts: np.ndarray  # (n_bins,) nonnegative ints
    L_scale: float
    n_bins: int


@dataclass(frozen=True)
class TopoFeatureVector:
    channels: tuple[BinnedChannel, ...]
    flat: np.ndarray  # (12 * n_bins,) int64

    def __len__(self) -> int:
        return int(self.flat.size)


def truncate_bars(barcode: Barcode, L_scale: float) -> list[tuple[float, float]]:
    """Clamp deaths to L_scale so every bar is finite on [0, L_scale]."""
    return [(b, min(d, L_scale)) for b, d in barcode.bars]


def bin_barcode(
    bars: list[tuple[float, float]],
    kind: BinKind,
    L_scale: float = DEFAULT_L_SCALE,
    n: int = DEFAULT_N_BINS,
) -> np.ndarray:
    """Counts per bin for one channel kind.

    With delta = L_scale / n and bins i = 1..n: birth counts bars whose
    birth lies in [(i-1)*delta, i*delta) (half-open, last bin closed at
    L_scale), death likewise for deaths, and persistence counts bars that
    straddle the whole bin: birth <= (i-1)*delta and death >= i*delta.
    Bars must be finite and inside [0, L_scale]; truncate first.
    """
    if n < 1:
        raise ValueError(f"need at least one bin, got {n}")
    if L_scale <= 0:
        raise ValueError(f"L_scale must be > 0, got {L_scale}")
    counts = np.zeros(n, dtype=np.int64)
    if not bars:
        return counts
    births = np.array([b for b, _ in bars])
    deaths = np.array([d for _, d in bars])
    if not (np.all(np.isfinite(births)) and np.all(np.isfinite(deaths))):
        raise BinRangeError("infinite bar endpoint; truncate deaths to L_scale first")
    if births.min() < 0 or deaths.max() > L_scale or np.any(births > deaths):
        raise BinRangeError(
            f"bar endpoints outside [0, {L_scale}]; truncate deaths first"
        )
    delta = L_scale / n
    if kind in (BinKind.BIRTH, BinKind.DEATH):
        values = births if kind is BinKind.BIRTH else deaths
        idx = np.minimum(np.floor(values / delta).astype(np.int64), n - 1)
        np.add.at(counts, idx, 1)
    else:
        edges = delta * np.arange(n + 1)
        for i in range(n):
            counts[i] = np.count_nonzero(
                (births <= edges[i]) & (deaths >= edges[i + 1])
            )
    return counts


def topo_features(
    structure: ProteinStructure,
    L_scale: float = DEFAULT_L_SCALE,
    n_bins: int = DEFAULT_N_BINS,
    max_dim: int = 3,
    simplex_cap: int = DEFAULT_SIMPLEX_CAP,
) -> TopoFeatureVector:
    """The 12-channel binned vector (flat length 12 * n_bins).

    Runs persistence once per selector, truncates surviving H1/H2 bars at
    L_scale and bins all three kinds per dimension.
    """
    channels: list[BinnedChannel] = []
    barcodes_by_selector = {}
    for selector in (AtomSelector.ALL_CARBON, AtomSelector.ALL_HEAVY):
        barcodes = barcode_for_selection(
            structure, selector, max_scale=L_scale, max_dim=max_dim,
            simplex_cap=simplex_cap,
        )
        barcodes_by_selector[selector] = {bc.dim: bc for bc in barcodes}
    for selector, dim, kind in CHANNEL_ORDER:
        barcode = barcodes_by_selector[selector].get(dim, Barcode(dim, []))
        bars = truncate_bars(barcode, L_scale)
        counts = bin_barcode(bars, kind, L_scale, n_bins)
        channels.append(
            BinnedChannel(
                kind=kind,
                atom_selector=selector,
                dim=dim,
                counts=counts,
                L_scale=L_scale,
                n_bins=n_bins,
            )
        )
    flat = np.concatenate([c.counts for c in channels])
    return TopoFeatureVector(channels=tuple(channels), flat=flat)
