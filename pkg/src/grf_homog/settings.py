"""Process-wide numerical thresholds.

Read at call time, so assigning e.g. ``settings.validation_tol = 1e-10``
affects every later structural check.
"""

# structural checks (antisymmetry, Jacobi, reductivity, ad-invariance);
# catalog inputs are exact rationals rendered in floating point
validation_tol = 1e-12

# infinitesimal isotropy invariance of tensors on m
invariance_tol = 1e-10
