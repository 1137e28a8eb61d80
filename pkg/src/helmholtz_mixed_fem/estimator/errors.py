"""
Exact errors against known solutions, used by the experiment tables.
"""

import numpy as np

from ..exceptions import EstimatorError
from ..spaces import default_quad_degree, physical_points, triangle_rule


def _field_error(xh, coeffs, exact, quad_degree):
    points, weights = triangle_rule(quad_degree)
    values = exact(physical_points(xh.mesh, points))
    discrete = xh.evaluate(coeffs, points)
    return float(np.sqrt(np.sum(xh.jacobians * (np.sum((values - discrete) ** 2, axis=2) @ weights))))


def exact_error(solution, p_exact, mesh=None, quad_degree=None):
    """
    ||p - p_h||_{L2} by quadrature.

    Raises:
        EstimatorError: If ``mesh`` is given and differs from the solution mesh
    """
    if mesh is not None and mesh.uid != solution.mesh.uid:
        raise EstimatorError("Exact error requested on a mesh the solution does not live on")
    return _field_error(solution.xh, solution.p, p_exact, quad_degree or default_quad_degree(solution.k))


def curl_error(solution, curl_alpha_exact, mesh=None, quad_degree=None):
    """||Curl(alpha - alpha_h)||_{L2} by quadrature."""
    if mesh is not None and mesh.uid != solution.mesh.uid:
        raise EstimatorError("Curl error requested on a mesh the solution does not live on")
    return _field_error(solution.xh, solution.curl_alpha, curl_alpha_exact, quad_degree or default_quad_degree(solution.k))
