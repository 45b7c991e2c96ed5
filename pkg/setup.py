"""Build script: compiles the optional Cython word-merge core.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time), so any build failure here is
downgraded to a warning.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/fermifields/_core_cy.pyx"],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False},
    )
except Exception as exc:  # pragma: no cover - environment without cython/cc
    sys.stderr.write(f"fermifields: skipping compiled core ({exc!r}); "
                     "pure-Python fallback will be used\n")

setup(ext_modules=ext_modules)
