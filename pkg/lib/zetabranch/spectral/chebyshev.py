'''
Chebyshev collocation on [-1, 1] with barycentric Lagrange evaluation.
'''

import numpy as np
from numpy.polynomial import chebyshev
from scipy.interpolate import BarycentricInterpolator

from .discretization_interface import DiscretizationInterface

class ChebyshevFirstKind(DiscretizationInterface):
    '''
    Roots of T_n. No node sits on the chart ends.
    '''
    name = 'chebyshev'

    def nodes(self, order: int) -> np.ndarray:
        if order < 1:
            raise ValueError(f'Collocation order must be positive, got {order}')
        return chebyshev.chebpts1(order)

    def basis(self, order: int, points) -> np.ndarray:
        nodes = self.nodes(order)
        points = np.atleast_1d(np.asarray(points, dtype=float))
        if order == 1:
            return np.ones((len(points), 1))
        return np.atleast_2d(BarycentricInterpolator(nodes, np.eye(order))(points))

class ChebyshevLobatto(ChebyshevFirstKind):
    '''
    Extrema of T_(n-1), including both chart ends.
    '''
    name = 'chebyshev-lobatto'

    def nodes(self, order: int) -> np.ndarray:
        if order < 1:
            raise ValueError(f'Collocation order must be positive, got {order}')
        if order == 1:
            return np.zeros(1)
        return chebyshev.chebpts2(order)
