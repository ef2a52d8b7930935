"""Certified computations in free and finitely presented groups.

The package is organized by machinery:

- :mod:`mcgcert.words` — reduced words in free groups, homomorphisms, parsing.
- :mod:`mcgcert.stallings` — folded subgroup graphs and everything they decide
  (membership, index, rank, bases, intersections).
- :mod:`mcgcert.fpgroup` — finite presentations: abelianization via Smith
  normal form, coset enumeration, subgroup presentations, rewriting
  certificates, permutation images.
- :mod:`mcgcert.quasi` — counting quasimorphisms on free groups, defects,
  homogenization, bounded cochains.
- :mod:`mcgcert.constructions` — the concrete groups, subgroups, and
  endomorphisms the check suite exercises, plus the report machinery.
- :mod:`mcgcert.cli` — the ``mcgcert`` command-line interface.
"""

from mcgcert.words import (
    Alphabet,
    AlphabetMismatch,
    FreeHom,
    ParseError,
    Word,
    ball,
    format_word,
    parse_word,
)

__all__ = [
    "Alphabet",
    "AlphabetMismatch",
    "FreeHom",
    "ParseError",
    "Word",
    "ball",
    "format_word",
    "parse_word",
    "Report",
    "VerifyConfig",
    "verify_all",
]

__version__ = "0.1.0"

from mcgcert.constructions import Report, VerifyConfig, verify_all  # noqa: E402
