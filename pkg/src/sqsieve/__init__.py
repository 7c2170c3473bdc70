"""Numeric verification toolkit for prime equidistribution modulo smooth squares.

Subpackages cover the exact-rational exponent ledger, Buchstab-function
evaluation, the deficiency-integral domains and their quasi-Monte-Carlo
estimation, brute-force exponential-sum checks, and desk-scale prime counts
in progressions to square moduli.
"""

__version__ = "0.1.0"
