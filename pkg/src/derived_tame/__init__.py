"""Derived categories of finite-dimensional algebras as sliced boxes.

Algebras given by quivers with relations, bounded minimal complexes of
projectives, the sliced box whose representations are those complexes,
parameter spaces of complexes with fixed ranks, and one-parameter families.
"""

__version__ = "0.1.0"

from .algebra import AlgebraData, build_algebra, check_coassociativity  # noqa: E402
from .corpus import corpus_algebra, corpus_family  # noqa: E402
from .fields import QQ, finite_field, parse_field  # noqa: E402
from .presentation import load_family, load_presentation, parse_family, parse_presentation  # noqa: E402

__all__ = [
    "AlgebraData", "QQ", "build_algebra", "check_coassociativity", "corpus_algebra", "corpus_family",
    "finite_field", "load_family", "load_presentation", "parse_family", "parse_field", "parse_presentation",
]
