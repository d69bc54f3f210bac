"""Build script: compiles the optional fast-kernel extension.

The extension is optional; the package falls back to the numpy kernel
implementations when it is missing, so a failed native build must not
abort installation.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that degrades to the pure-python kernels on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"WARNING: building the compiled kernels failed ({exc}); "
            "pupilbench will use the numpy fallback kernels.",
            file=sys.stderr,
        )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("WARNING: Cython not available; skipping compiled kernels.", file=sys.stderr)
        return []
    ext = Extension(
        "pupilbench._kernels_cy",
        ["src/pupilbench/_kernels_cy.pyx"],
        # -ffp-contract=off keeps float results bit-comparable with the
        # numpy fallback (no FMA contraction).
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
