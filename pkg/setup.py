#!/usr/bin/env python3
# -*- coding: utf-8 -*-
from setuptools import setup

setup(name='mg1li',
      version='1.0',
      description='Level-increment truncation of M/G/1-type Markov chains: '
                  'Ramaswami recursion, G-matrix and convergence asymptotics',
      license='MIT',
      packages=['mg1li'],
      package_data={'mg1li': ['examples/*.json']},
      python_requires='>=3.8',
      install_requires=[
        'numpy',
        'scipy',
      ],
      extras_require={
        'tests': ['pytest', 'hypothesis'],
        'examples': ['matplotlib'],
      },
      entry_points={
        'console_scripts': ['mg1li = mg1li.cli:main'],
      },
     )
