"""Exact-arithmetic toolkit for local models of logarithmic and intersection
complexes near a normal crossing divisor: weight filtrations, star operations,
infinitesimal mixed Hodge structure checks, graded decompositions and
weight/purity verdicts."""

__version__ = "0.1.0"
