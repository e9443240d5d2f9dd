"""Build script wiring up the optional compiled stencil kernels.

The package is pure Python plus one Cython extension for the bounded-axis
derivative kernels.  If Cython or a C compiler is unavailable the install
still succeeds and the package falls back to the numpy implementation at
import time.
"""

import sys

from setuptools import setup

extensions = []
try:
    import numpy as np
    from Cython.Build import cythonize

    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "phfluid._stencils",
                ["src/phfluid/_stencils.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(f"phfluid: skipping compiled kernels ({exc})\n")

setup(ext_modules=extensions)
