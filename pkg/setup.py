"""Build the optional Cython kernels.

The pure-numpy fallback in ``pec._fallback`` is used whenever the compiled
module is missing, so a failed extension build leaves a working install.
"""
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: skipping compiled kernels ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: failed to build {ext.name} ({exc})", file=sys.stderr)


def _extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    if sys.platform == "win32":
        compile_args, link_args = ["/O2", "/openmp", "/fp:precise"], []
    else:
        # fp-contract=off keeps the kernel bit-identical to the numpy path
        compile_args = ["-O3", "-fopenmp", "-ffp-contract=off"]
        link_args = ["-fopenmp"]
    ext = Extension(
        "pec._kernels",
        ["src/pec/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=compile_args,
        extra_link_args=link_args,
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
