"""Build script: compiles the optional C extension for the exploration engine.

The package works without the extension (a pure-Python engine is selected at
import time); building it just makes state-space exploration much faster.
Set TICKCHECK_SKIP_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("TICKCHECK_SKIP_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "tickcheck.engine._core",
                    ["src/tickcheck/engine/_core.pyx"],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        print("Cython not available; building without the compiled engine")

setup(ext_modules=ext_modules)
