from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("wellblock._kernels", ["src/wellblock/_kernels.pyx"])],
        compiler_directives={"language_level": "3", "boundscheck": False,
                             "wraparound": False, "cdivision": True},
    )
except ImportError:
    # Without Cython the package falls back to the pure-Python kernels.
    ext_modules = []

setup(ext_modules=ext_modules)
