import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "latcrit._kernels._ckern",
        ["src/latcrit/_kernels/_ckern.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,  # pure-python backend takes over if the build is unavailable
    )
]

setup(
    ext_modules=cythonize(extensions, language_level=3) if cythonize else [],
)
