"""Build script. The compiled kernels are optional: if Cython or a C
compiler is unavailable the package installs anyway and falls back to the
pure-Python kernels at import time."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("SDNLB_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "sdnlb._ckernels",
                    ["src/sdnlb/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except Exception as exc:  # noqa: BLE001 - any build problem means "no extension"
        print(f"sdnlb: compiled kernels skipped ({exc}); using pure-Python fallback")

setup(ext_modules=ext_modules)
