"""Build script: compiles the optional Cython trial-kernel extension.

The extension is a pure speed-up; if it cannot be built (no compiler, no
Cython, or DVBANDIT_NO_EXT=1) the package installs anyway and falls back to
the pure-Python kernels at import time.

-ffp-contract=off keeps the C arithmetic bit-identical to CPython's (no FMA
contraction), which the backend-equivalence tests rely on.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that degrades to a pure-Python install on compile failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler/toolchain
            print(f"WARNING: extension build skipped ({exc}); "
                  "dvbandit will use the pure-Python backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"WARNING: building {ext.name} failed ({exc}); "
                  "dvbandit will use the pure-Python backend")


ext_modules = []
cmdclass = {}
if not os.environ.get("DVBANDIT_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "dvbandit._ckernels",
                    ["src/dvbandit/_ckernels.pyx"],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            language_level=3,
        )
        cmdclass["build_ext"] = optional_build_ext
    except ImportError:
        print("WARNING: Cython not available; building pure-Python dvbandit")

setup(ext_modules=ext_modules, cmdclass=cmdclass)
