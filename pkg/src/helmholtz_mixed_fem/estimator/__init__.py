"""
Estimator package: a posteriori error estimators and exact errors.
"""
from .errors import curl_error, exact_error
from .estimators import EstimatorReport, edge_jump_terms, element_mu2, estimate, estimate_lambda, estimate_mu

__all__ = [
    "EstimatorReport",
    "curl_error",
    "edge_jump_terms",
    "element_mu2",
    "estimate",
    "estimate_lambda",
    "estimate_mu",
    "exact_error",
]
