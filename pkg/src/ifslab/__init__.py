"""Exact symbolic laboratory for iterated function systems.

Spaces are countable: finitely many named atoms plus finitely many
countably infinite indexed blocks.  Sets are kept in a canonical
finite/cofinite form per block, so all boolean operations, topological
questions posed by openness clauses, piecewise-map images and preimages,
and the dynamics of induced set operators are computed exactly, with no
floating point and no approximation.  Universal statements that range
over infinitely many sets are verified up to explicit bounds that travel
with the verdict.
"""

from .bounds import DEFAULT_SEED, Bounds
from .config import LabConfig, load_config, loads, parse_point, parse_set
from .errors import (
    ConfigError,
    ContractViolation,
    GroundMismatchError,
    IntegrityError,
    ValidationError,
)
from .hyperspace import (
    BasisNeighborhood,
    ClosureCertificate,
    ImageMembershipVerdict,
    InImage,
    NonClosednessReport,
    NotInImageBounded,
    NotInImageCertified,
    closure_challenge,
    guided_closure_proof,
    is_in_hutchinson_image,
    nbhd_contains,
    non_closedness_report,
)
from .ifs import (
    IFS,
    AttractorFound,
    ContractivityCertified,
    ContractivityInconclusive,
    ContractivityRefuted,
    Word,
    attractor_from_space,
    contractivity_certificate,
    distinguishing_witness,
    fixed_point_search,
)
from .instances import (
    broken_parity_map,
    discrete_topology,
    parity_ground,
    parity_lab,
    parity_system,
    parity_topology,
    solo_a_system,
    to_a,
    to_b,
)
from .maps import (
    ConstRule,
    IdentityRule,
    PiecewiseMap,
    identity_map,
    is_closed_map_bounded,
    is_topological_contraction,
    space_chain,
)
from .render import format_point, format_set
from .setalg import (
    Atom,
    BlockElem,
    GroundStructure,
    Point,
    SymbolicSet,
    enumerate_sets,
    random_set,
    truncate,
)
from .topology import (
    Avoids,
    CofiniteWithin,
    Meets,
    OpennessClause,
    SubsetOf,
    TopologySpec,
)

__version__ = "0.1.0"
