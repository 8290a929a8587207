"""Twisted Chevalley algebras and elementary twisted Chevalley groups over
commutative rings with involution, with exact arithmetic throughout."""

from __future__ import annotations

from .chevalley import LieVector, StructureTable, ad_matrix, bracket, compute_structure_constants, fix_signs_for_rho
from .groups import Character, GroupElement, exp_root, is_self_conjugate, sigma_on_group, torus_element, twisted_generator, w_and_h
from .rings import parse_ring, split_fixed_antifixed, theta
from .roots import build_root_system, classify_orbits, standard_rho
from .twist import coordinates_in_twisted_basis, sigma_on_algebra, twisted_basis, twisted_table

__version__ = "0.1.0"
