"""Compressed spaced suffix arrays.

Spaced suffix arrays are stored relative to the suffix array of the same
text (or relative to each other) by partitioning ``SA^-1 o SSA`` into
increasing subsequences and keeping two label strings with rank/select
support.  Arbitrary permutations can likewise be stored against a similar
stored permutation, e.g. the suffix array of an edited document.
"""

from .container import Container, read_container, write_container
from .permutations import compose, lds_length, partition_increasing
from .relative_index import (
    CompressedSSA,
    RelativeDocumentSA,
    SeedCollection,
    access_ssa,
    compress_relative,
    compress_relative_document_sa,
    compress_ssa,
    estimate_pair_cost,
    find_matching,
    plan_reference_tree,
    rho_bound,
)
from .relperm import Mode, ReferenceBundle, ReferenceLink, RelativePermutation, encode
from .succinct import LabeledSequence, RsBitvector, build_labeled
from .suffixes import SpacedSuffixArray, SuffixArray, build_sa, build_ssa, inverse
from .textmodel import SpacedSeed, Text, extract_key, load_text, parse_seed

__version__ = "0.1.0"
