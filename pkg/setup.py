import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# No -ffast-math: the pure-Python fallback must reproduce the native
# clustering results bit for bit, which requires strict IEEE semantics.
extensions = [
    Extension(
        "bibmap.kernels._native",
        ["src/bibmap/kernels/_native.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
