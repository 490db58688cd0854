"""Classical ground-state energy estimation for local Pauli-sum Hamiltonians.

The pipeline: express the guiding state's imaginary-time normalization
D_beta(H - x) = <psi| exp(-beta (H - x)) |psi> through one of four
interchangeable backends (exact diagonalization, truncated cluster/series
expansion, simulated interference-test sampling, analytic continuation),
then scan the residue D_beta - D_{2 beta} over a promised interval until it
collapses at the ground energy.
"""

from .circuits import Gate, ShallowCircuit, conjugate_by_circuit, load_circuit_json
from .config import Caps, DEFAULT_CAPS, load_caps
from .continuation import (
    ContinuationParams,
    ZeroFreeCertificate,
    conformal_map_coeffs,
    conformal_map_value,
    continuation_order,
    continued_log_partition,
    select_continuation_params,
    zero_free_certificate,
)
from .errors import (
    BackendError,
    CapExceededError,
    CertificateError,
    DegenerateOverlapError,
    DimensionError,
    EmptyHamiltonianError,
    ItescanError,
    ParseError,
    ScanExhaustedError,
)
from .expansion import (
    MomentTable,
    PartitionEstimate,
    cluster_tail_bound,
    compute_moments,
    estimate_partition,
    log_amplitude_series,
    truncation_order,
)
from .graph import (
    Cluster,
    InteractionGraph,
    beta_star,
    build_graph,
    cluster_count_check,
    count_connected_clusters,
    enumerate_connected_clusters,
    lattice_degree_bound,
)
from .mc import (
    McSampleSet,
    build_sample_set,
    cauchy_norm,
    estimate_Z,
    sample_count,
    sample_times,
    simulate_hadamard,
    truncation_tail,
    truncation_time,
)
from .oracle import (
    SpectralData,
    ZeroFreeScan,
    exact_loschmidt,
    exact_partition,
    exact_residue,
    spectrum,
    zero_free_scan,
)
from .pauli import (
    LocalHamiltonian,
    PauliString,
    normalize_hamiltonian,
    parse_hamiltonian,
    rescale_coefficients,
    serialize_hamiltonian,
)
from .scan import (
    ScanConfig,
    ScanParameters,
    ScanPoint,
    ScanResult,
    derive_scan_parameters,
    energy_scan,
    validate_gap_assumption,
)
from .series import TruncatedSeries, series_compose, series_eval, series_exp, series_log
from .states import (
    ProductState,
    SemiClassicalState,
    apply_pauli,
    dump_state_json,
    load_state_json,
)

__version__ = "0.1.0"
