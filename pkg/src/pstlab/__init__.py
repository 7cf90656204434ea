"""Periodicity and perfect state transfer for continuous-time quantum walks on graphs."""

from .decomposition import (
    EigenvalueSupport,
    SpectralDecomposition,
    decompose,
    eigendecompose,
    is_periodic_at_vertex,
    ratio_condition,
    support,
    support_via_charpoly,
)
from .errors import (
    GraphError,
    IntegrityError,
    NotHadamardError,
    ParseError,
    PstlabError,
    UnsupportedInputError,
)
from .evolution import (
    MultiplicityEnumerator,
    PSTCertificate,
    UnitaryEvolution,
    certify_pst,
    detect_pst,
    evolve,
    evolve_taylor,
    fidelity,
    is_periodic_graph,
    multiplicity_enumerator,
    pst_scan,
    unit_circle_zero_test,
)
from .graph import (
    Graph,
    antipodal_classes,
    cartesian_product,
    complete,
    cycle,
    delete_vertex,
    distance_graph,
    hypercube,
    path,
    petersen,
)
from .graphio import parse_edge_list, parse_graph6, read_graph, serialize_graph6, write_graph
from .hadamard import (
    HadamardMatrix,
    XHGraph,
    base4,
    graph_from_rshcd,
    is_rshcd,
    kron,
    pst_time_xh,
    srg_from_rshcd,
    twist,
)
from .spectrum import (
    CharPoly,
    ExactAngle,
    Spectrum,
    char_poly,
    compute_spectrum,
    integer_roots,
    moment_checks,
    periodicity_verdict,
    recognize_spectrum,
    square_eigenvalue_check,
)
from .structure import (
    coherent_closure,
    is_distance_regular,
    is_walk_regular,
    pst_preconditions,
    schur_probe,
)

__version__ = "0.1.0"
