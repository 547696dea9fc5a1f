"""Corpus engine for NLI over a multiply-quantified sentence fragment.

The package generates premise/hypothesis pairs from a fixed nine-field
template, labels them two independent ways (natural-logic composition over
derived relation tables, and bounded first-order countermodel search), and
writes balanced, reproducible corpora.
"""

__version__ = "0.1.0"
