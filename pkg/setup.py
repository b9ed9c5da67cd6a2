"""Build script: compiles the Cython kernel extension when a toolchain is
available.  The extension is optional -- covertree falls back to the pure
Python kernels at import time if the compiled module is missing."""

import os

from setuptools import Extension, setup


def extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    rand_lib = os.path.join(os.path.dirname(np.random.__file__), "lib")
    ext = Extension(
        "covertree._kernels",
        sources=["src/covertree/_kernels.pyx"],
        include_dirs=[np.get_include()],
        library_dirs=[rand_lib],
        libraries=["npyrandom"],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions())
