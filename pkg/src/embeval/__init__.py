"""embeval: intrinsic evaluation of word embeddings against a SKOS thesaurus."""

__version__ = "0.1.0"

from .metrics import coverage, diversity, diversity_matrix, relational_coverage
from .neighbors import NeighborSet, cosine, normalize_rows, top_k, top_k_batch
from .stringsim import RatioMatch, VocabIndex, best_match, edit_distance_sub2, ratio
from .thesaurus import Thesaurus, descriptor_pairs, keywords, parse_ntriples_skos, parse_tsv
from .vectors import EmbeddingModel, contains, load_vec, save_vec, vector

__all__ = [
    "EmbeddingModel",
    "NeighborSet",
    "RatioMatch",
    "Thesaurus",
    "VocabIndex",
    "__version__",
    "best_match",
    "contains",
    "cosine",
    "coverage",
    "descriptor_pairs",
    "diversity",
    "diversity_matrix",
    "edit_distance_sub2",
    "keywords",
    "load_vec",
    "normalize_rows",
    "parse_ntriples_skos",
    "parse_tsv",
    "ratio",
    "relational_coverage",
    "save_vec",
    "top_k",
    "top_k_batch",
    "vector",
]
