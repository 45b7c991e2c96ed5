"""Backend selection for the sparse-word hot kernels.

Prefers the compiled Cython core, falling back to the pure-Python twin.
``BACKEND`` reports which one is active; both expose ``merge_words``,
``wedge_terms`` and ``contract`` with identical semantics.
"""

try:
    from ._core_cy import BACKEND, contract, merge_words, wedge_terms
except ImportError:  # pragma: no cover - depends on build environment
    from ._core_py import BACKEND, contract, merge_words, wedge_terms

__all__ = ["BACKEND", "merge_words", "wedge_terms", "contract"]
