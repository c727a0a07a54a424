"""Builds the optional compiled pixel kernels.

The package works without them: regionlogic.kernels falls back to the numpy
implementation when the extension is missing (see src/regionlogic/kernels.py).
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "regionlogic._kernels",
                ["src/regionlogic/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
