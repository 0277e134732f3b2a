"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension; if the toolchain is
unavailable the build falls back to the pure-Python kernels selected at
import time.
"""
from __future__ import annotations

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, otherwise continue without it."""

    def run(self) -> None:
        try:
            super().run()
        except Exception as exc:  # toolchain missing, headers missing, ...
            print(f"warning: skipping compiled kernels ({exc})", file=sys.stderr)

    def build_extension(self, ext) -> None:
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(
                f"warning: could not compile {ext.name} ({exc}); "
                "pure-Python kernels will be used",
                file=sys.stderr,
            )


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "poincrep._kernels._fastcore",
        ["src/poincrep/_kernels/_fastcore.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
