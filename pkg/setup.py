"""Build script: compiles the invariant-sum kernel extension when possible.

The compiled module is optional; flowmaps falls back to the numpy kernel at
import time if the extension is absent. Set FLOWMAPS_PURE_PYTHON=1 to skip
the compile step entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("FLOWMAPS_PURE_PYTHON"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "flowmaps._kernels._minors_cy",
                    ["src/flowmaps/_kernels/_minors_cy.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
