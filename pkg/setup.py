"""Build the optional Cython fuzzy-scoring kernel.

If Cython or a C compiler is unavailable the package still installs and
falls back to the pure-Python scorer at import time.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("GEODIS_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("geodis.fuzz._cfuzz", ["src/geodis/fuzz/_cfuzz.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # pragma: no cover
        print(f"geodis: building without compiled kernel ({exc})")

setup(ext_modules=ext_modules)
