"""Exact arithmetic: integers, cyclotomic rings, finite fields, polynomials."""
from .cyclotomic import CyclotomicElement, cyclotomic_is_rational, cyclotomic_poly
from .factor import (
    FactoredInt,
    divisors,
    euler_phi,
    factorize,
    is_prime,
    is_prime_power,
    is_square,
    mobius,
    mult_parts,
    omega,
    phi_sieve,
    primes_up_to,
    squarefree_part,
)
from .ffield import FiniteField, cubic_root_count, field, first_irreducible
from .poly import IntPolynomial
from .surd import HalfPower, SurdSum

__all__ = [
    "CyclotomicElement", "cyclotomic_is_rational", "cyclotomic_poly", "FactoredInt",
    "divisors", "euler_phi", "factorize", "is_prime", "is_prime_power", "is_square",
    "mobius", "mult_parts", "omega", "phi_sieve", "primes_up_to", "squarefree_part", "FiniteField",
    "cubic_root_count", "field", "first_irreducible", "IntPolynomial", "HalfPower", "SurdSum",
]
