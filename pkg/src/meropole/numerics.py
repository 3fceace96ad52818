"""Complex-plane numerical kernel.

Contour quadrature for Laurent coefficients of matrix-valued families,
pole-order detection, numerical rank, determinant winding numbers, and a
principal-branch complex log-Gamma.

All operations are pure: node evaluations could run concurrently, but the
reductions are performed in a fixed order so results are deterministic
regardless of scheduling. No numerical derivative of a family is ever
taken; derivative-flavored quantities are reduced to contour integrals or
winding numbers.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContourError,
    DeterminantVanishesError,
    DomainError,
    PoleOrderBoundError,
    ResolutionError,
)

__all__ = [
    "DEFAULT_TOL",
    "RANK_FLOOR",
    "MAGNITUDE_CAP",
    "DENSE_DIM_LIMIT",
    "ContourSpec",
    "FamilyHandle",
    "ScalarBlockFamily",
    "LaurentData",
    "scalar_family",
    "scalar_block_family",
    "log_gamma",
    "laurent_coefficient",
    "laurent_expand",
    "numerical_rank",
    "total_polar_rank",
    "winding_number_det",
]

# Shared defaults: relative detection/rank tolerance, absolute rank floor,
# contour evaluation magnitude cap, winding retry budget, dense inflation cap.
DEFAULT_TOL = 1e-8
RANK_FLOOR = 1e-14
MAGNITUDE_CAP = 1e12
WINDING_MAX_DOUBLINGS = 6
DENSE_DIM_LIMIT = 200


@dataclass(frozen=True)
class ContourSpec:
    """Circle |lambda - center| = radius traversed once counterclockwise.

    ``nodes`` equispaced quadrature nodes (>= 16, even). No singularity of
    the analyzed family may lie on the circle; this is guarded operationally
    by requiring every node evaluation to be finite and bounded by
    ``magnitude_cap``.
    """

    center: complex
    radius: float
    nodes: int = 256
    magnitude_cap: float = MAGNITUDE_CAP

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise DomainError(f"contour radius must be positive and finite, got {self.radius}")
        if self.nodes < 16 or self.nodes % 2 != 0:
            raise DomainError(f"contour nodes must be even and >= 16, got {self.nodes}")
        if not self.magnitude_cap > 0:
            raise DomainError("magnitude_cap must be positive")

    def points(self, nodes: int | None = None) -> np.ndarray:
        """Quadrature nodes center + radius*exp(2*pi*i*k/N), k = 0..N-1."""
        n = self.nodes if nodes is None else nodes
        theta = 2.0 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.exp(1j * theta)


@dataclass(frozen=True)
class FamilyHandle:
    """A pure evaluator lambda -> m x m complex matrix of known dimension.

    ``evaluate`` must be deterministic (same lambda -> bit-identical matrix),
    finite off the singular set, and safely shareable across concurrent
    callers.
    """

    dim: int
    evaluate: Callable[[complex], np.ndarray]
    label: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError(f"family dimension must be >= 1, got {self.dim}")

    def __call__(self, lam: complex) -> np.ndarray:
        return self.evaluate(lam)


@dataclass(frozen=True)
class ScalarBlockFamily(FamilyHandle):
    """Block-diagonal family given by scalar evaluators with multiplicities.

    ``blocks`` is a tuple of (scalar evaluator, multiplicity) pairs; the
    family is diag(f_1 * I_{m_1}, f_2 * I_{m_2}, ...). Determinant windings
    and diagonal residues are computed block-wise, so the family remains
    usable beyond the dense inflation limit.
    """

    blocks: tuple[tuple[Callable[[complex], complex], int], ...] = ()


def scalar_family(f: Callable[[complex], complex], label: str = "") -> FamilyHandle:
    """Wrap a scalar function as a 1 x 1 family."""

    def evaluate(lam: complex) -> np.ndarray:
        return np.array([[f(lam)]], dtype=complex)

    return FamilyHandle(dim=1, evaluate=evaluate, label=label)


def scalar_block_family(
    blocks: list[tuple[Callable[[complex], complex], int]] | tuple, label: str = ""
) -> ScalarBlockFamily:
    """Assemble a ScalarBlockFamily from (scalar evaluator, multiplicity) pairs.

    Dense evaluation inflates the diagonal matrix explicitly and is only
    permitted for dimensions <= DENSE_DIM_LIMIT; larger families must be
    consumed block-wise.
    """
    blocks = tuple((f, int(mult)) for f, mult in blocks)
    if not blocks or any(mult < 1 for _, mult in blocks):
        raise DomainError("blocks must be a nonempty sequence of (evaluator, multiplicity >= 1)")
    dim = sum(mult for _, mult in blocks)

    def evaluate(lam: complex) -> np.ndarray:
        if dim > DENSE_DIM_LIMIT:
            raise ValueError(
                f"dense evaluation disabled for dimension {dim} > {DENSE_DIM_LIMIT}; "
                "use the block-wise operations"
            )
        diag = np.concatenate([np.full(mult, f(lam), dtype=complex) for f, mult in blocks])
        return np.diag(diag)

    return ScalarBlockFamily(dim=dim, evaluate=evaluate, label=label, blocks=blocks)


# ---------------------------------------------------------------------------
# log-Gamma
# ---------------------------------------------------------------------------

# Lanczos coefficients, g = 7, 9 terms (classic double-precision set).
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def _log_gamma_lanczos(z: complex) -> complex:
    # valid for Re(z) >= 0.5
    x = z - 1.0
    a = _LANCZOS_C[0]
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        a += c / (x + i)
    t = x + 7.5
    return _HALF_LOG_TWO_PI + (x + 0.5) * cmath.log(t) - t + cmath.log(a)


def log_gamma(z: complex) -> complex:
    """Principal branch of log Gamma(z).

    Lanczos sum for Re(z) >= 1/2; otherwise the exact recurrence
    log Gamma(z) = log Gamma(z + m) - sum_j Log(z + j), which preserves the
    principal branch on the plane cut along the negative real axis.

    Raises DomainError at the poles z in {0, -1, -2, ...}.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real.is_integer():
        raise DomainError(f"log_gamma pole at z = {z.real:g}")
    if z.real >= 0.5:
        return _log_gamma_lanczos(z)
    m = int(math.ceil(0.5 - z.real))
    shift = 0.0 + 0.0j
    for j in range(m):
        shift += cmath.log(z + j)
    return _log_gamma_lanczos(z + m) - shift


# ---------------------------------------------------------------------------
# Contour quadrature
# ---------------------------------------------------------------------------


def _node_matrix_values(F: FamilyHandle, pts: np.ndarray, cap: float) -> np.ndarray:
    vals = np.empty((len(pts), F.dim, F.dim), dtype=complex)
    for k, lam in enumerate(pts):
        mat = np.asarray(F.evaluate(complex(lam)), dtype=complex)
        if mat.shape != (F.dim, F.dim):
            raise DomainError(
                f"family {F.label!r} returned shape {mat.shape}, expected {(F.dim, F.dim)}"
            )
        if not np.all(np.isfinite(mat)):
            raise ContourError(
                f"non-finite evaluation of {F.label!r} at node {k} (lambda = {lam}): "
                "singularity on or near the contour"
            )
        if np.max(np.abs(mat)) > cap:
            raise ContourError(
                f"evaluation of {F.label!r} at node {k} (lambda = {lam}) exceeds the "
                f"magnitude cap {cap:g}: singularity on or near the contour"
            )
        vals[k] = mat
    return vals


def _coefficient_from_values(vals: np.ndarray, c: ContourSpec, j: int) -> np.ndarray:
    # (1/2 pi i) \oint F(lam) (lam - center)^{-j-1} dlam by the trapezoidal
    # rule reduces to the discrete average of F(lam_k) (r e^{i theta_k})^{-j}.
    n = len(vals)
    theta = 2.0 * np.pi * np.arange(n) / n
    weights = np.exp(-1j * j * theta) * (c.radius ** (-j)) / n
    # np.add.reduce: fixed pairwise order over the node index, deterministic.
    return np.add.reduce(weights[:, None, None] * vals, axis=0)


def laurent_coefficient(F: FamilyHandle, c: ContourSpec, j: int) -> np.ndarray:
    """j-th Laurent coefficient of F at c.center by trapezoidal contour quadrature.

    Spectrally accurate for families analytic on the circle. Raises
    ContourError if any node evaluation is non-finite or above the cap.
    """
    vals = _node_matrix_values(F, c.points(), c.magnitude_cap)
    return _coefficient_from_values(vals, c, int(j))


@dataclass
class LaurentData:
    """Local Laurent data of a family: center, pole order p >= 0, coefficients.

    ``coeffs`` maps j -> A_j for -p <= j <= J; coefficients below the
    detection threshold for j < -p were discarded, and ``tail_bound`` records
    the largest norm among them.
    """

    center: complex
    pole_order: int
    coeffs: dict[int, np.ndarray] = field(default_factory=dict)
    tail_bound: float = 0.0

    def coefficient(self, j: int) -> np.ndarray:
        """A_j, or the zero matrix for discarded sub-threshold indices."""
        if j in self.coeffs:
            return self.coeffs[j]
        any_val = next(iter(self.coeffs.values()))
        return np.zeros_like(any_val)


def laurent_expand(
    F: FamilyHandle, c: ContourSpec, p_max: int = 6, J: int = 6, tol: float = DEFAULT_TOL
) -> LaurentData:
    """Laurent coefficients A_j, j = -p_max..J, with pole-order detection.

    The caller guarantees the center is the only candidate singularity
    inside the contour. The detected pole order is the largest q < p_max
    with ||A_{-q}|| > tol * max(1, ||A_0||); if A_{-p_max} itself is above
    that threshold the true order may exceed the budget and
    PoleOrderBoundError is raised (p_max must strictly exceed the order).
    """
    p_max = int(p_max)
    J = int(J)
    if p_max < 0 or J < 0:
        raise DomainError("p_max and J must be nonnegative")
    vals = _node_matrix_values(F, c.points(), c.magnitude_cap)
    coeffs = {j: _coefficient_from_values(vals, c, j) for j in range(-p_max, J + 1)}

    threshold = tol * max(1.0, float(np.linalg.norm(coeffs[0])))
    norms = {j: float(np.linalg.norm(coeffs[j])) for j in range(-p_max, 0)}
    if p_max >= 1 and norms[-p_max] > threshold:
        raise PoleOrderBoundError(
            f"||A_{{-{p_max}}}|| = {norms[-p_max]:.3e} exceeds threshold {threshold:.3e}: "
            "pole order may exceed p_max, raise the budget"
        )
    pole_order = 0
    for q in range(p_max - 1, 0, -1):
        if norms[-q] > threshold:
            pole_order = q
            break
    tail = max((norms[j] for j in range(-p_max, -pole_order)), default=0.0)
    kept = {j: coeffs[j] for j in range(-pole_order, J + 1)}
    return LaurentData(center=c.center, pole_order=pole_order, coeffs=kept, tail_bound=tail)


# ---------------------------------------------------------------------------
# Rank
# ---------------------------------------------------------------------------


def numerical_rank(a: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    """Number of singular values above tol * sigma_max.

    Rank 0 whenever sigma_max <= the absolute floor 1e-14.
    """
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0
    if not np.all(np.isfinite(a)):
        raise DomainError("numerical_rank requires a finite matrix")
    s = np.linalg.svd(a, compute_uv=False)
    smax = float(s[0])
    if smax <= RANK_FLOOR:
        return 0
    return int(np.count_nonzero(s > tol * smax))


def total_polar_rank(lau: LaurentData, tol: float = DEFAULT_TOL) -> int:
    """Dimension of the sum of the images of all negative Laurent coefficients.

    Computed as the rank of the horizontally concatenated block
    [A_{-1} | A_{-2} | ... | A_{-p}]. Requires pole_order >= 1.
    """
    if lau.pole_order < 1:
        raise DomainError("total_polar_rank requires a pole (pole_order >= 1)")
    stacked = np.hstack([lau.coefficient(-i) for i in range(1, lau.pole_order + 1)])
    return numerical_rank(stacked, tol)


# ---------------------------------------------------------------------------
# Winding numbers
# ---------------------------------------------------------------------------


def _winding_from_sampler(sampler: Callable[[np.ndarray], np.ndarray], c: ContourSpec) -> int:
    """Continuous-argument tracking of a nonvanishing scalar on the contour.

    ``sampler`` maps the node array to unit-scale complex samples (the
    determinant phases). Phase increments per step must stay below pi/2;
    otherwise the node count doubles, up to the retry cap.
    """
    n = c.nodes
    for _ in range(WINDING_MAX_DOUBLINGS + 1):
        samples = sampler(c.points(n))
        increments = np.angle(np.roll(samples, -1) / samples)
        if float(np.max(np.abs(increments))) < 0.5 * np.pi:
            total = float(np.add.reduce(increments))
            w = round(total / (2.0 * np.pi))
            if abs(total - 2.0 * np.pi * w) > 1e-6:
                raise ResolutionError(
                    f"argument tracking failed to close (residual {total - 2 * np.pi * w:.2e})"
                )
            return int(w)
        n *= 2
    raise ResolutionError(
        f"phase increments stayed >= pi/2 after {WINDING_MAX_DOUBLINGS} node doublings"
    )


def _det_phase_sampler(F: FamilyHandle, cap: float):
    def sampler(pts: np.ndarray) -> np.ndarray:
        vals = _node_matrix_values(F, pts, cap)
        signs = np.empty(len(pts), dtype=complex)
        for k in range(len(pts)):
            sign, logabs = np.linalg.slogdet(vals[k])
            if sign == 0 or not np.isfinite(logabs):
                raise DeterminantVanishesError(
                    f"det of {F.label!r} vanishes at node {k} (lambda = {pts[k]})"
                )
            signs[k] = sign
        return signs

    return sampler


def _scalar_value_sampler(f: Callable[[complex], complex], label: str):
    def sampler(pts: np.ndarray) -> np.ndarray:
        out = np.empty(len(pts), dtype=complex)
        for k, lam in enumerate(pts):
            v = complex(f(complex(lam)))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ContourError(f"non-finite evaluation of {label!r} at lambda = {lam}")
            if v == 0:
                raise DeterminantVanishesError(f"{label!r} vanishes at lambda = {lam}")
            out[k] = v
        return out

    return sampler


def winding_number_det(F: FamilyHandle, c: ContourSpec) -> int:
    """Integer winding of det F(lambda) around c.center, counterclockwise.

    Requires det F nonvanishing on the contour. For a ScalarBlockFamily the
    determinant is the product of the block scalars with multiplicity, so the
    winding is accumulated block-wise (in block order) without inflating the
    matrix.
    """
    if isinstance(F, ScalarBlockFamily) and F.blocks:
        total = 0
        for idx, (f, mult) in enumerate(F.blocks):
            label = f"{F.label}[block {idx}]"
            total += mult * _winding_from_sampler(_scalar_value_sampler(f, label), c)
        return total
    return _winding_from_sampler(_det_phase_sampler(F, c.magnitude_cap), c)
