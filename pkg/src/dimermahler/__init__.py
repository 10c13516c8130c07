"""Dimer models on the honeycomb torus, their characteristic polynomials and
the Mahler measures, q-series and L-values attached to them."""

from .kasteleyn import (
    EdgeWeighting,
    char_poly,
    example_weighting,
    family_polynomial,
    gauge_transform,
    kasteleyn_matrix,
    laurent_char_poly,
    scale_all,
    symbolic_char_poly,
)
from .lattice_graph import build_torus_graph, enumerate_matchings, render_tiling_svg, to_rhombus_tiling
from .laurent import LaurentPoly2
from .mahler import mahler_jensen, mahler_quadrature
from .qseries import QSeries, eisenstein, eta_quotient, q_product, solve_q, t_of_q, verify_mahler_product
from .torus_partition import brute_force_partition, partition_function, pn_eval, sector_values

__all__ = [
    "EdgeWeighting", "LaurentPoly2", "QSeries",
    "brute_force_partition", "build_torus_graph", "char_poly", "eisenstein", "enumerate_matchings",
    "eta_quotient", "example_weighting", "family_polynomial", "gauge_transform", "kasteleyn_matrix",
    "laurent_char_poly", "mahler_jensen", "mahler_quadrature", "partition_function", "pn_eval",
    "q_product", "render_tiling_svg", "scale_all", "sector_values", "solve_q", "symbolic_char_poly",
    "t_of_q", "to_rhombus_tiling", "verify_mahler_product",
]
