"""Build the optional compiled kernels.

If Cython or a C compiler is missing the package still installs and runs on
the numpy fallback.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "rank3frob._ckernels",
                ["src/rank3frob/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:  # pragma: no cover
    pass

setup(ext_modules=ext_modules)
