from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernels are optional: if Cython or a C compiler is missing the
# package falls back to the pure-Python implementations at import time.
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "mcqforge._speedups",
                ["src/mcqforge/_speedups.pyx"],
                optional=True,
            )
        ],
        language_level="3",
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
