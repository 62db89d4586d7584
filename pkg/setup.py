import numpy
from setuptools import Extension, setup

from Cython.Build import cythonize

# -ffp-contract=off keeps the compiler from fusing multiply-adds; the kernel
# contract promises bit-identical results against the pure-Python backend.
extensions = [
    Extension(
        "frfband._kernels",
        ["src/frfband/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
