from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off: the compiled kernels must produce bit-identical results
# to the pure-Python backend, so FMA contraction is disabled.
ext = Extension(
    "fhmix._kernels",
    ["src/fhmix/_kernels.pyx"],
    extra_compile_args=["-O2", "-ffp-contract=off"],
)

setup(ext_modules=cythonize([ext], language_level=3))
