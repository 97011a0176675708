"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-Python kernel backend is
selected at import time), so a failed or skipped compilation is not fatal
for development installs built with ``--no-build-isolation``.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "dworklab.kernels._speedups",
                ["src/dworklab/kernels/_speedups.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
