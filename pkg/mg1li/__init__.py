# -*- coding: utf-8 -*-
"""
mg1li: stationary distributions of level-increment truncated M/G/1-type
Markov chains and the asymptotics of their truncation error
"""
#package version
__version__ = '1.0'

__all__ = ['model', 'tails', 'numerics', 'gmatrix', 'ramaswami',
           'asymptotics', 'oracle', 'cli']
