"""A library signature for machine integers at desk scale.

int is a datatype of K nullary constructors I0..I{K-1}; equality compiles to
nested case analysis, so each test costs one application plus two rec
unfoldings.  K defaults to 16 rather than 2^32 to keep the generated program
small.
"""

from __future__ import annotations

DEFAULT_K = 16


def int_decl_text(k: int = DEFAULT_K) -> str:
    ctors = " | ".join(f"I{i} of unit" for i in range(k))
    return f"datatype int = {ctors};"


def eqint_def_text(k: int = DEFAULT_K) -> str:
    """eqint : int * int -> bool as nested rec over both arguments."""
    outer = []
    for i in range(k):
        inner = " | ".join(
            f"I{j} -> v. {'True' if i == j else 'False'}()" for j in range(k)
        )
        outer.append(f"I{i} -> u. rec(b; {inner})")
    branches = "\n  | ".join(outer)
    return (
        "def eqint : int * int -> bool =\n"
        "  fn p. split p as (a, b) in\n"
        f"  rec(a; {branches});"
    )


def int_library_text(k: int = DEFAULT_K) -> str:
    return int_decl_text(k) + "\n\n" + eqint_def_text(k)
