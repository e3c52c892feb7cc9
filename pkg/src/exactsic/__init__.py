"""Exact construction and verification of Weyl-Heisenberg SIC fiducial vectors.

The package builds fiducial vectors in dimensions d = n^2 + 3 = 4p from
minimal-polynomial data for certain units of the real quadratic field
Q(sqrt(D)), doing all of the load-bearing arithmetic exactly: rationals,
quadratic irrationals, and towers of small relative extensions.  Floating
point appears only inside rigorous complex balls used to steer the exact
computations and to certify embeddings.

Subpackages and modules:

  exact       rationals, Q(sqrt(D)), extension towers, balls, reconstruction
  towers      the dimension sequence d_ell(D) and its divisibility calculus
  heisenberg  Weyl-Heisenberg and Clifford operators, monomial 4-part
  stark_io    datasets: ingested minimal polynomials and field towers
  galois      automorphism groups of the towers, exact root lifting
  ansatz      candidate fiducial vectors and the residual search
  verify      SIC conditions, exactly and numerically
  cli         command line front end
"""

__version__ = "0.1.0"
