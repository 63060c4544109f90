from setuptools import setup

try:
    from Cython.Build import cythonize
    import numpy as np
except ImportError:  # pure-Python install; the numpy fallback is used
    ext_modules = []
else:
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [Extension("weakppc._ckernels", ["src/weakppc/_ckernels.pyx"],
                   include_dirs=[np.get_include()])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
