"""Query-complexity laboratory for space-bounded matrix-vector products.

Subpackages:
    core      instances, oracle access, query ledger, exact references
    qsim      search and counting subroutines (cost model / statevector / exact)
    linsys    classical baseline and the space-bounded quantum algorithm
    sweep     sweep grids, scaling fits, report emission
    subspace  adversary-style subspace decomposition laboratory
    polylab   polynomial-method laboratory (Chebyshev bounds, LP extremals)
"""

__version__ = "0.1.0"
