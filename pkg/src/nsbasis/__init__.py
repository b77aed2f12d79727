"""Exact Neron-Severi bases for five families of elliptic surfaces over P^1."""
from .derham import hodge_table, j_set, spanning_witness
from .kodaira import classify, fiber_config
from .mwsections import admissible_set, catalog_points, is_admissible_ex1, mw_rank, verify_on_curve
from .nslattice import BasisCertificate, CertificationFailed, build_instance, certify_basis, height_crosscheck
from .weierstrass import build_family

__all__ = [
    "BasisCertificate", "CertificationFailed", "admissible_set", "build_family", "build_instance",
    "catalog_points", "certify_basis", "classify", "fiber_config", "height_crosscheck", "hodge_table",
    "is_admissible_ex1", "j_set", "mw_rank", "spanning_witness", "verify_on_curve",
]
__version__ = "0.1.0"
