"""Build script: compiles the optional accelerator extension when Cython is present.

The package is fully functional without the extension (a numpy fallback is
selected at import).  Set POLARWIRE_PURE_PY=1 to skip the build entirely.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("POLARWIRE_PURE_PY") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "polarwire.kernels._accel",
                    sources=["src/polarwire/kernels/_accel.pyx"],
                )
            ],
            compiler_directives={"language_level": 3},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
