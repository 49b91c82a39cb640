"""Build hook for the optional compiled ranking kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a missing compiler or Cython only costs speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            # no -ffast-math: tie handling depends on IEEE-exact compares
            Extension(
                "cocitebench._rank_ext",
                ["src/cocitebench/_rank_ext.pyx"],
                extra_compile_args=["-O3", "-march=native"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
