"""Build script: compiles the enumeration kernel when Cython is available.

The package works without the extension (a pure-Python kernel is selected
at import time); set CONDRISK_SKIP_EXT=1 to skip compilation explicitly.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CONDRISK_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "condrisk._coverage_ext",
                    ["src/condrisk/_coverage_ext.pyx"],
                    # -ffp-contract=off: no FMA contraction, so the compiled
                    # kernel is bit-identical to the pure-Python fallback.
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
