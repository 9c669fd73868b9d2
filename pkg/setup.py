import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RTF_LAB_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("rtflab._ckernels", ["src/rtflab/_ckernels.pyx"],
                       include_dirs=[np.get_include()],
                       extra_compile_args=["-O3", "-fopenmp"],
                       extra_link_args=["-fopenmp"])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
