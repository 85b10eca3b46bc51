"""Build script: compiles the search kernels when Cython is available.

The package is fully functional without the extension; `amalgam._kernels`
falls back to the pure-Python implementations at import time.
"""

from pathlib import Path

from setuptools import setup

PYX = Path("src/amalgam/_kernels/_ckernels.pyx")

ext_modules = []
if PYX.exists():
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [str(PYX)],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
