from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "affbcast.core._engine",
        ["src/affbcast/core/_engine.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
