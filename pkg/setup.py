"""Build script: compiles the optional Euler-path accelerator.

The package installs and works without the extension; the simulator falls
back to a pure-Python kernel selected at import time (see infoflow.kernels).
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    # -ffp-contract=off: no FMA contraction, so the compiled kernel stays
    # bit-identical to the pure-Python fallback.
    ext_modules = cythonize(
        [
            Extension(
                "infoflow._kernels",
                ["src/infoflow/_kernels.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    warnings.warn("Cython not available; installing with the pure-Python kernel only")


class OptionalBuildExt(build_ext):
    """Degrade to the pure-Python kernel when no working C toolchain exists."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            warnings.warn(f"compiled kernel build failed ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernel build failed ({exc}); using pure-Python fallback")


setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
