"""Edge-disjoint isomorphic subgraph certificates for simple graphs."""
from ._accel import BACKEND
from .bounds import iso_volume, similarity_by_expectation, split_star_forest, star_cover
from .driver import drive, regime_params, union_bound_log
from .generate import gnp
from .graph import BipartiteView, Graph, SimilarityCertificate, VertexBijection, build_graph, verify_certificate
from .greedy import GreedyConfig, greedy_bipartite_similarity, key_similarity
from .oracle import iso_exact, iso_exact_naive

__version__ = "0.1.0"
