"""Build script: compiles the optional float-mode kernels.

The compiled extension only accelerates float arithmetic; every feature is
also available through the pure-Python implementations in
``layerwave.kernels``, so a failed compile degrades to a working install.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Swallow compiler failures; the package works without the extension."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(f"WARNING: compiled kernels unavailable, using pure Python ({exc})",
              file=sys.stderr)


ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/layerwave/_speedups.pyx"],
        language_level=3,
    )
except Exception as exc:  # noqa: BLE001
    print(f"WARNING: cython unavailable, skipping compiled kernels ({exc})",
          file=sys.stderr)

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
