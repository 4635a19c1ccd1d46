"""Exact-arithmetic toolkit for mixed trTLEP-structures and mixed Frobenius
structures at finite jet truncation.

Submodules
----------
linalg      exact rational matrices, subspaces, flags
jets        truncated power series, jet matrices, flat gauge
polytope    reflexive polygons, semigroup degrees, face strata
bmodel      toric Landau-Ginzburg Jacobian rings and Gauss-Manin jets
trtlep      Frobenius-type / mixed trTLEP data model and axiom checkers
unfolding   order-by-order universal unfolding and structure extraction
limit_mhs   nilpotent-limit construction on cokernels
amodel      local A-model pipeline for P(K_S + O) over toric surfaces
"""

__version__ = "0.1.0"
