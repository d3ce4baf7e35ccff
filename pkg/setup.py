#!/usr/bin/env python

# Project skeleton maintained at https://github.com/jaraco/skeleton

import io

import setuptools

with io.open('README.md', encoding='utf-8') as readme:
    long_description = readme.read()

name = 'bregmoreau'
description = ('Left and right Bregman-Moreau envelopes, proximity '
               'operators and projectors for Legendre kernels')
nspkg_technique = 'native'
"""
Does this package use "native" namespace packages or
pkg_resources "managed" namespace packages?
"""

params = dict(
    name=name,
    use_scm_version=True,
    description=description or name,
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=setuptools.find_packages(exclude=['examples', 'examples.*']),
    include_package_data=True,
    package_data={'bregmoreau.tests': ['*.ini']},
    namespace_packages=(
        name.split('.')[:-1] if nspkg_technique == 'managed'
        else []
    ),
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.20',
        'scipy>=1.7',
    ],
    extras_require={
        'testing': [
            # upstream
            "pytest",
            'collective.checkdocs',

            # local
            'pytest-cov',
            'mock',
        ],
        'docs': [
            # upstream
            'sphinx',
            'jaraco.packaging>=3.2',
            'rst.linker>=1.9',

            # local
        ],
        'pandas': ['pandas'],
    },
    setup_requires=[
        'setuptools_scm>=1.15.0,<8',
    ],
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    entry_points={
        'console_scripts': [
            'bregmoreau = bregmoreau.cli:main',
        ],
    },
)

if __name__ == '__main__':
    setuptools.setup(**params)
