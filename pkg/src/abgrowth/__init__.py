"""Growth functions of finite subgraphs in Cayley graphs of abelian groups."""

from .abelian import (
    AbelianStructure,
    GroupSpec,
    OrderedAlphabet,
    PresentationError,
    derive_structure,
    evaluate,
    load_group,
    mu,
    parse_group_spec,
    relation_matrix,
)
from .acceptor import Acceptor, build_acceptor, fellow_traveller_constant, minimal_relations
from .oracle import BallTable, enumerate_ball, geodesic_length, is_shortlex, shortlex_nf, sphere_counts
from .series import IntPoly, RationalGF, expand, state_growth, tail_series, vertex_growth, walk_count
from .smith import smith_normal_form
from .subgraph import (
    GrowthReport,
    Subgraph,
    c_series,
    count_morphisms,
    growth_exact,
    growth_fit,
    load_subgraph,
    verify_main_theorem,
)

__version__ = "0.1.0"
