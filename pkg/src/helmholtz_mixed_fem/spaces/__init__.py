"""
Spaces package: quadrature, analytic fields and the finite element spaces
X_h = P_k(T; R^2) and Y_h = P_{k+1}(T) with zero mean.
"""
from .fields import ScalarField, VectorField
from .quadrature import default_mu_quad_degree, default_quad_degree, edge_rule, integrate, physical_points, triangle_rule
from .xh import XhSpace, build_xh, l2_project, project_between, reference_basis
from .yh import YhSpace, build_yh, curl_of, derivative_matrix

__all__ = [
    "ScalarField",
    "VectorField",
    "XhSpace",
    "YhSpace",
    "build_xh",
    "build_yh",
    "curl_of",
    "default_mu_quad_degree",
    "default_quad_degree",
    "derivative_matrix",
    "edge_rule",
    "integrate",
    "l2_project",
    "physical_points",
    "project_between",
    "reference_basis",
    "triangle_rule",
]
