"""Magnetic operators on periodic discrete graphs: band structure and bounds."""

from .graph import (
    BadIndexDimension,
    Disconnected,
    Edge,
    FundamentalGraph,
    GraphError,
    LatticeSpanDeficient,
    NonpositiveWeight,
    OneForm,
    OrientedEdge,
    Vertex,
    degree,
    validate,
    weighted_degree,
)
from .topology import (
    FluxData,
    MinimalFluxData,
    NotCotreeEdge,
    RankDeficient,
    SpanningTree,
    betti,
    check_span,
    cycle_for,
    flux,
    flux_data,
    gauge_function,
    gauge_shift,
    minimal_reduction,
    modified_form,
    principal_flux,
    spanning_tree,
    tree_gauge,
    wrap_torus,
    zero_phase_point,
)
from .fiber import (
    FiberMatrix,
    NotHermitian,
    Spectrum,
    assemble_flux,
    assemble_raw,
    assemble_weighted,
    eigen,
    gradient,
)
from .spectrum import (
    BandStructure,
    FlatBand,
    PathBands,
    TorusGrid,
    band_path,
    default_grid,
    flat_bands,
    measure_and_gaps,
    merge_intervals,
    sweep,
)
from .bounds import (
    BoundReport,
    EffectiveForm,
    GraphMismatch,
    NotExtremum,
    NotSimpleEigenvalue,
    PerturbationData,
    check_gap_bound,
    check_total_band_length,
    check_weighted_band_length,
    effective_form,
    perturbation_bounds,
    verify_bounds,
)
from .library import (
    BadFraction,
    BandOracle,
    NamedGraph,
    figure1_graph,
    harper,
    hexagonal,
    square_lattice,
    star_lattice,
)
from .specfile import (
    ParseError,
    ValidationError,
    band_csv,
    band_json,
    gnuplot_script,
    load_spec,
    parse_spec,
    path_csv,
    serialize_spec,
)

__version__ = "0.1.0"
