"""Book-algorithm toolkit for two-color Ramsey numbers.

Exact edge colorings, the classical and book-based clique-finding
algorithms with step traces, small exhaustive oracles, the geometric
refinement lemma, and a certified maximiser for the two-variable
inequalities that drive the exponent bounds.
"""

from .book import BookVariant, run_book, trace_report
from .certify import certify_max, check_certificate, emit_contour, verify_offdiag_inequality, verify_taylor_inequality
from .classic import ramsey_book_induction, run_es, run_es_offdiag
from .coloring import Color, DomainError, EdgeColoring, density, generate, load, paley
from .fields import Field, entropy, field_eval
from .oracle import book_ramsey_number, ramsey_number
from .search import BookWitness, CliqueWitness, book_to_clique, find_book, find_clique
from .symmetric import refinement_witness, run_symmetric

__version__ = "0.1.0"

__all__ = [
    "BookVariant", "BookWitness", "CliqueWitness", "Color", "DomainError", "EdgeColoring", "Field",
    "book_ramsey_number", "book_to_clique", "certify_max", "check_certificate", "density", "emit_contour",
    "entropy", "field_eval", "find_book", "find_clique", "generate", "load", "paley", "ramsey_book_induction",
    "ramsey_number", "refinement_witness", "run_book", "run_es", "run_es_offdiag", "run_symmetric",
    "trace_report", "verify_offdiag_inequality", "verify_taylor_inequality",
]
