"""Build hook for the optional compiled kernel extension.

The package is pure Python plus one Cython extension for the hot sampling
loops; if Cython or a C compiler is unavailable the extension is skipped
and the NumPy kernel backend is selected at import time.
"""

import os

import numpy
from setuptools import Extension, setup

# The numpy C API for the bit-generator distributions lives in a static
# library shipped inside numpy.random.
_npyrandom_dir = os.path.join(os.path.dirname(numpy.random.__file__), "lib")

ext = Extension(
    "treegibbs._kernels._core",
    sources=["src/treegibbs/_kernels/_core.pyx"],
    include_dirs=[numpy.get_include()],
    library_dirs=[_npyrandom_dir],
    libraries=["npyrandom"],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    optional=True,
)

try:
    from Cython.Build import cythonize

    ext_modules = cythonize([ext], language_level=3)
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
