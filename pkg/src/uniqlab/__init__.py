"""uniqlab: desk-scale numerics for discrete Fourier uniqueness pairs.

Modules
-------
pairs
    Sampling lattices, density functionals, pair classification, and the
    closed-form identities behind the criticality algebra.
products
    Canonical products with certified truncation error, indicator and
    kappa estimates, Jensen zero-counting decay checks.
interpolation
    Uniform subsequence selection and the Beurling-type interpolant with
    its interpolation/growth verifications.
uniqueness
    Hermite-basis sampling operators, singular-value density scans, Hardy
    growth tests, and decay-transfer experiments.
cli
    Config-driven experiment runner emitting reproducible CSV/JSON tables.
"""

from .serialize import ARTIFACT_VERSION as __version__

__all__ = ["__version__"]
