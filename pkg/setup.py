import sys

from setuptools import Extension, setup

# The compiled kernel is an optional speedup. If Cython or a C compiler is
# unavailable the package falls back to the numpy implementation at import.
ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "sqsieve._kernels",
                ["src/sqsieve/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError as exc:
    print(f"sqsieve: building without compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
