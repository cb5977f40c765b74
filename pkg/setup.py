#!/usr/bin/env python3

import os
from setuptools import setup, find_packages

NO_NUMBA = os.environ.get("PYFURST_NO_NUMBA", None) == "1"

setup_options = dict(
    name='pyfurst',
    version='0.1.0',
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={'pyfurst': ['data/*.json']},
    license='LICENSE',
    description='A python laboratory for random walks on SL(d, R): Lyapunov spectra, '
                'harmonic measures, entropies and dimensions.',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    author='The pyfurst developers',
    python_requires='>=3.7',
    install_requires=[
        "numpy",
        "scipy",
        "psutil",
    ],
    extras_require={"numba": ["numba"]},
    entry_points={'console_scripts': ['pyfurst=pyfurst.cli:main']},
    test_suite='pyfurst',
)

if not NO_NUMBA:
    setup_options["install_requires"] = setup_options["install_requires"] + ["numba"]

setup(**setup_options)
