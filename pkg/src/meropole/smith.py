"""Local Smith exponents of meromorphic matrix families.

At a point lambda0 a meromorphic family with meromorphic inverse factors as
U1(lambda) * diag((lambda - lambda0)^{k_l}) * U2(lambda) with U1, U2
holomorphically invertible. The integer exponents k_l (the partial
multiplicities; negative for poles, positive for zeros) are recovered
numerically from ranks of lower block-triangular Toeplitz matrices of the
Taylor coefficients of the analytic germ, without ever constructing the
invertible factors. Everything here is a pure function over immutable
inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError, InsufficientOrderError
from .numerics import (
    DEFAULT_TOL,
    RANK_FLOOR,
    ContourSpec,
    FamilyHandle,
    laurent_expand,
    winding_number_det,
)

__all__ = [
    "SmithExponents",
    "toeplitz_partial_multiplicities",
    "meromorphic_exponents",
    "null_multiplicity",
    "polar_null_multiplicity",
    "kernel_dimension",
    "shifted_exponents",
    "log_residue_check",
]


@dataclass(frozen=True)
class SmithExponents:
    """Sorted multiset of local Smith exponents of a family at ``center``.

    Zeros correspond to the locally invertible block, negative exponents to
    polar directions, positive exponents to null directions. The length
    equals the family dimension and the sum equals the winding number of the
    determinant around the center. ``warnings`` carries ill-conditioning
    notes from the rank computations.
    """

    center: complex
    exponents: tuple[int, ...]
    warnings: tuple[str, ...] = ()


def _rank_with_margin(a: np.ndarray, tol: float) -> tuple[int, bool]:
    """Rank at relative tolerance plus an ambiguity flag.

    The flag is set when some singular value falls within a factor 10 of the
    threshold, i.e. the rank decision is not clearly separated.
    """
    s = np.linalg.svd(a, compute_uv=False)
    smax = float(s[0]) if len(s) else 0.0
    if smax <= RANK_FLOOR:
        return 0, False
    threshold = tol * smax
    rank = int(np.count_nonzero(s > threshold))
    ambiguous = bool(np.any((s > threshold / 10.0) & (s < threshold * 10.0)))
    return rank, ambiguous


def toeplitz_partial_multiplicities(
    germ_coeffs: list[np.ndarray], tol: float = DEFAULT_TOL
) -> tuple[list[int], list[str]]:
    """Nonnegative Smith exponents of an analytic germ G(w) = sum G_j w^j.

    Uses the rank profile of the lower block-triangular Toeplitz matrices
    T_q = [G_{i-k}]_{0 <= i,k <= q}: with d_{q+1} = m(q+1) - rank(T_q) the
    increment d_{q+1} - d_q counts the exponents >= q+1, and the iteration
    stops at the first zero increment. Requires det G not identically zero;
    operationally, the increments must stabilize within the supplied order,
    otherwise InsufficientOrderError is raised. Returns the exponents sorted
    ascending together with any ill-conditioning warnings.
    """
    coeffs = [np.asarray(g, dtype=complex) for g in germ_coeffs]
    if not coeffs:
        raise DomainError("germ_coeffs must be nonempty")
    m = coeffs[0].shape[0]
    for g in coeffs:
        if g.shape != (m, m):
            raise DomainError("all germ coefficients must be square of equal size")
    order = len(coeffs) - 1

    warnings: list[str] = []
    counts: list[int] = []
    d_prev = 0
    for q in range(order + 1):
        size = m * (q + 1)
        t = np.zeros((size, size), dtype=complex)
        for i in range(q + 1):
            for k in range(i + 1):
                t[i * m : (i + 1) * m, k * m : (k + 1) * m] = coeffs[i - k]
        rank, ambiguous = _rank_with_margin(t, tol)
        if ambiguous:
            warnings.append(
                f"rank of Toeplitz block at order {q} is ill-conditioned "
                "(singular value within 10x of threshold)"
            )
        d = size - rank
        c = d - d_prev
        if c < 0 or c > m or (counts and c > counts[-1]):
            raise ConsistencyError(
                f"Toeplitz rank increments not monotone at order {q} "
                f"(increment {c}): tolerance failure"
            )
        if c == 0:
            kappas = [0] * m
            for count in counts:
                for i in range(count):
                    kappas[i] += 1
            return sorted(kappas), warnings
        counts.append(c)
        d_prev = d
    raise InsufficientOrderError(
        f"rank increments did not stabilize within Taylor order {order}; "
        "supply more germ coefficients"
    )


def meromorphic_exponents(
    F: FamilyHandle, c: ContourSpec, p_max: int = 6, tol: float = DEFAULT_TOL
) -> SmithExponents:
    """Smith exponents of a meromorphic family at c.center.

    Runs the Laurent expansion, forms the analytic germ
    G(w) = w^p F(center + w) with Taylor coefficients G_j = A_{j-p}, computes
    the nonnegative germ exponents from Toeplitz ranks, and shifts back by
    the pole order p. The center must be the only point inside the contour
    where F or its inverse is singular.

    The Taylor order budget is derived from the determinant winding w:
    sum kappa_i = w + m*p bounds the stabilization order exactly; a margin
    of 4 is added and the budget is doubled once on stabilization failure.
    """
    w = winding_number_det(F, c)
    m = F.dim
    lau = laurent_expand(F, c, p_max=p_max, J=4, tol=tol)
    p = lau.pole_order

    budget = max(w + m * p, 0) + 4
    for attempt in range(2):
        if budget - p > 4 or attempt > 0:
            lau = laurent_expand(F, c, p_max=p_max, J=max(budget - p, 0), tol=tol)
        germ = [lau.coefficient(j - p) for j in range(budget + 1)]
        try:
            kappas, warns = toeplitz_partial_multiplicities(germ, tol)
        except InsufficientOrderError:
            if attempt == 1:
                raise
            budget *= 2
            continue
        break

    exponents = tuple(sorted(k - p for k in kappas))
    if sum(exponents) != w:
        raise ConsistencyError(
            f"sum of exponents {sum(exponents)} disagrees with determinant winding {w}: "
            "contour may enclose extra zeros or poles"
        )
    return SmithExponents(center=c.center, exponents=exponents, warnings=tuple(warns))


def null_multiplicity(s: SmithExponents) -> int:
    """Sum of the positive exponents: zeros of the family counted with multiplicity."""
    return sum(k for k in s.exponents if k > 0)


def polar_null_multiplicity(s: SmithExponents) -> int:
    """Sum of |k| over negative exponents: the inverse family's null multiplicity.

    Always nonnegative; by inversion the exponents of the pointwise inverse
    family are the negated multiset, so its positive part is {-k : k < 0}.
    """
    return sum(-k for k in s.exponents if k < 0)


def kernel_dimension(s: SmithExponents) -> int:
    """Number of strictly positive exponents: dim of the eigenvector space at the center."""
    return sum(1 for k in s.exponents if k > 0)


def shifted_exponents(s: SmithExponents) -> SmithExponents:
    """Exponents of (lambda - center)^{-1} F: every exponent drops by one.

    Satisfies null_multiplicity(shifted) =
    null_multiplicity(s) - kernel_dimension(s).
    """
    return SmithExponents(
        center=s.center,
        exponents=tuple(k - 1 for k in s.exponents),
        warnings=s.warnings,
    )


def log_residue_check(F: FamilyHandle, c: ContourSpec, s: SmithExponents) -> bool:
    """Generalized logarithmic residue identity as an exact integer check.

    True iff the determinant winding equals both the exponent sum and the
    difference of null and polar null multiplicities. ``s`` must have been
    computed for F at the same center.
    """
    w = winding_number_det(F, c)
    total = sum(s.exponents)
    return w == total == null_multiplicity(s) - polar_null_multiplicity(s)
