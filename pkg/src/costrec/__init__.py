"""Recurrence extraction for a call-by-value language with inductive
datatypes: cost semantics, a cost-annotated translation, size-based
denotational interpretation, and an inequational theory for the results.
"""

__version__ = "0.1.0"
