"""Build script: compiles the optional accelerator extension.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so the build is marked optional and any compiler
failure degrades to a pure-Python install.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.path.exists("src/cpqr/_core.pyx"):
    try:
        from Cython.Build import cythonize
        import numpy
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "cpqr._core",
                    ["src/cpqr/_core.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    optional=True,
                )
            ],
            language_level=3,
        )

setup(ext_modules=ext_modules)
