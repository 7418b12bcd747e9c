"""Build script for the optional compiled statevector kernels.

The package works without the extension (a pure-NumPy fallback is selected
at import time); building it just makes per-shot sampling faster.
"""

import numpy as np
from setuptools import setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        "src/qavg/_statevec_c.pyx",
        compiler_directives={"language_level": "3"},
    )

setup(
    ext_modules=ext_modules,
    include_dirs=[np.get_include()],
)
