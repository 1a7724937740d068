"""Build script: compiles the optional Cython sampling kernels.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed or skipped extension build is not fatal.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "telesim._kernels._ckernels",
                ["src/telesim/_kernels/_ckernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
