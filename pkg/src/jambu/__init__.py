"""Cognate database engine for comparative wordlists.

The package is organized around an immutable in-memory :class:`~jambu.model.Database`:

- :mod:`jambu.model` - records, integrity validation, substring search
- :mod:`jambu.cldf` - dataset directory load/write and BibTeX handling
- :mod:`jambu.entries` - etymological dictionary entry parsing
- :mod:`jambu.ortho` - orthography profiles and grapheme segmentation
- :mod:`jambu.reflex` - reflex prediction dataset harness and scoring
- :mod:`jambu.metrics` - phoneme-level BLEU and TER
- :mod:`jambu.server` - read-only HTTP API
- :mod:`jambu.cli` - the ``jambu`` command
"""

from .model import (
    CognateSet,
    Database,
    Form,
    Language,
    Source,
    SourceRef,
    family_stats,
    forms_in_cognateset,
    search,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "CognateSet",
    "Database",
    "Form",
    "Language",
    "Source",
    "SourceRef",
    "family_stats",
    "forms_in_cognateset",
    "search",
    "validate",
    "__version__",
]
