import os
import warnings

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("GRIDPURSUIT_PURE") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "gridpursuit.core._speedups",
                    ["src/gridpursuit/core/_speedups.pyx"],
                    include_dirs=[numpy.get_include()],
                    language="c++",
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "initializedcheck": False,
                "cdivision": True,
            },
        )
    except Exception as exc:  # missing compiler or Cython: fall back to the pure backend
        warnings.warn(f"compiled core skipped, using pure backend: {exc}")
        ext_modules = []

setup(ext_modules=ext_modules)
