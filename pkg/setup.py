"""Build the optional compiled kernels.

Everything works without the extension; a failed or skipped build only means
the pure-Python kernels are used.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # no Cython: pure-Python install
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "hallspace._kernels",
                ["src/hallspace/_kernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
