#!/usr/bin/env python
# -*- coding: utf-8 -*-

from setuptools import setup, find_packages
import os
import io
import re

here = os.path.abspath(os.path.dirname(__file__))


def read(*filenames, **kwargs):
    encoding = kwargs.get('encoding', 'utf-8')
    sep = kwargs.get('sep', '\n')
    buf = []
    for filename in filenames:
        with io.open(os.path.join(here, filename), encoding=encoding) as f:
            buf.append(f.read())
    return sep.join(buf)


def version():
    match = re.search(r"^__version__ = '([^']+)'", read(os.path.join('radmab', '__init__.py')),
                      re.M)
    return match.group(1)

long_description = read('README.rst')

setup(
    name='radmab',
    version=version(),
    description="Radar-gated multi-armed bandit beam selection for joint radar-communication "
                "mmWave base stations",
    long_description=long_description,
    packages=find_packages(exclude=['tests']),
    package_data={'radmab': ['templates/*.md']},
    include_package_data=True,
    platforms='any',
    python_requires='>=3.6',
    classifiers=[
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Development Status :: 3 - Alpha',
        'Natural Language :: English',
        'Intended Audience :: Science/Research',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering',
    ],
    install_requires=['numpy', 'scipy', 'jinja2', 'markdown', 'pyyaml'],
    extras_require={'test': ['pytest'], 'docs': ['sphinx', 'sphinx_rtd_theme']},
    entry_points='''
        [console_scripts]
        radmab=radmab.cli:main
        '''
)
