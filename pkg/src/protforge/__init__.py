"""protforge: uniform multi-scale electrostatic and topological features
for protein structures, with Coulomb/GB energy computation and dataset
assembly for downstream regression models."""

__version__ = "0.1.0"

from .electro import ElectroFeatureVector, extract_features, feature_count
from .gb import (
    GBContext,
    born_sphere_energy,
    f_gb,
    gb_solvation_energy,
    perfect_born_radius,
)
from .octree import (
    KCAL_PER_MOL,
    ClusterTree,
    build_tree,
    coulomb_energy_direct,
    coulomb_energy_treecode,
    moments_via_m2m,
    multi_indices,
)
from .pipeline import (
    DatasetMatrix,
    LabeledRecord,
    MetricsReport,
    compute_metrics,
    export_dataset,
    fit_scaler,
    import_dataset,
    ingest_labels,
    iqr_filter,
)
from .rips import (
    Barcode,
    Filtration,
    Simplex,
    barcode_for_selection,
    build_rips_filtration,
    reduce_and_extract,
)
from .structure import (
    Atom,
    AtomSelector,
    Element,
    ProteinStructure,
    parse_pqr,
    select_atoms,
)
from .topo import BinKind, TopoFeatureVector, bin_barcode, topo_features

__all__ = [
    "Atom",
    "AtomSelector",
    "Barcode",
    "BinKind",
    "ClusterTree",
    "DatasetMatrix",
    "ElectroFeatureVector",
    "Element",
    "Filtration",
    "GBContext",
    "KCAL_PER_MOL",
    "LabeledRecord",
    "MetricsReport",
    "ProteinStructure",
    "Simplex",
    "TopoFeatureVector",
    "barcode_for_selection",
    "bin_barcode",
    "born_sphere_energy",
    "build_rips_filtration",
    "build_tree",
    "compute_metrics",
    "coulomb_energy_direct",
    "coulomb_energy_treecode",
    "export_dataset",
    "extract_features",
    "f_gb",
    "feature_count",
    "fit_scaler",
    "gb_solvation_energy",
    "import_dataset",
    "ingest_labels",
    "iqr_filter",
    "moments_via_m2m",
    "multi_indices",
    "parse_pqr",
    "perfect_born_radius",
    "reduce_and_extract",
    "select_atoms",
    "topo_features",
]
