"""Build the optional compiled kernel extension.

The package works without it (a numpy fallback is selected at import);
building it makes per-frame detection roughly an order of magnitude faster.
"""

import sys

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    numpy = None
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "plrtest._native",
                sources=["src/plrtest/_native.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )
else:
    print("plrtest: Cython/numpy not available at build time; "
          "installing without the compiled kernels", file=sys.stderr)

setup(ext_modules=ext_modules)
