"""Seeded generators of meromorphic families with known ground truth.

Two kinds of families are produced: unimodular sandwiches
U1(lambda) * diag((lambda - center)^{k_l}) * U2(lambda) with prescribed
Smith exponents, and resonance-style families mirroring a resolvent's local
structure (a rank-p residue at an eigenvalue, or a finite-rank polar part in
the variable z(lambda) = lambda*(n - lambda)).

Generation is pure given the seed: identical specs produce bit-identical
families. Random entries are drawn from a uniform complex box and factor
condition numbers at the center are kept below 1e3 by resampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .numerics import FamilyHandle

__all__ = [
    "SynthSpec",
    "ResonanceSpec",
    "UnimodularFactor",
    "SynthFamily",
    "EigenFamily",
    "ResolventFamily",
    "make_unimodular",
    "synth_family",
    "synth_eigen_family",
    "synth_resolvent_family",
]

_COND_CAP = 1e3
_BOX = 0.7  # uniform box half-width for random complex entries, modulus <= ~1


@dataclass(frozen=True)
class SynthSpec:
    """Prescription for a unimodular-sandwich family with known exponents."""

    dim: int
    center: complex
    exponents: tuple[int, ...]
    seed: int
    degree: int = 3

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("dim must be >= 1")
        if len(self.exponents) != self.dim:
            raise DomainError(
                f"exponent multiset has length {len(self.exponents)}, expected dim = {self.dim}"
            )
        if self.degree < 0:
            raise DomainError("degree must be >= 0")


@dataclass(frozen=True)
class ResonanceSpec:
    """Prescription for a resonance-style family.

    For an eigenvalue-type family supply ``lambda_e`` and ``rank``; for a
    resolvent-type family supply ``lambda0`` and ``z_exponents`` (negative
    integers, the polar exponents in the variable z - z(lambda0)).
    """

    ambient_dim: int
    n: int
    seed: int
    lambda_e: complex = 0.0
    rank: int = 1
    lambda0: complex = 0.0
    z_exponents: tuple[int, ...] = ()


class UnimodularFactor:
    """Polynomial matrix with determinant identically a nonzero constant.

    Built as a seeded product of elementary transvections (identity plus a
    polynomial multiple of an off-diagonal unit) and constant diagonal
    scalings, so unimodularity is exact by construction. ``coeffs`` holds
    the matrix coefficients of the powers of w = lambda - center.
    """

    def __init__(self, coeffs: np.ndarray):
        self.coeffs = np.asarray(coeffs, dtype=complex)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def __call__(self, w: complex) -> np.ndarray:
        acc = np.array(self.coeffs[-1], dtype=complex)
        for c in self.coeffs[-2::-1]:
            acc = acc * w + c
        return acc

    def inverse_at(self, w: complex) -> np.ndarray:
        return np.linalg.inv(self(w))


def _complex_box(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.uniform(-_BOX, _BOX, shape) + 1j * rng.uniform(-_BOX, _BOX, shape)


def _poly_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1], b.shape[2]), dtype=complex)
    for i in range(a.shape[0]):
        for j in range(b.shape[0]):
            out[i + j] += a[i] @ b[j]
    return out


def _poly_trim(coeffs: np.ndarray) -> np.ndarray:
    last = coeffs.shape[0] - 1
    while last > 0 and not np.any(coeffs[last]):
        last -= 1
    return coeffs[: last + 1]


def make_unimodular(dim: int, degree: int, seed: int) -> UnimodularFactor:
    """Seeded unimodular polynomial matrix factor, invertible at every lambda.

    Each of the 2*dim transvection steps uses a random polynomial of degree
    <= ``degree``; diagonal scalings use constants bounded away from zero.
    Resamples until the condition number at w = 0 is below 1e3.
    """
    if dim < 1 or degree < 0:
        raise DomainError("dim must be >= 1 and degree >= 0")
    rng = np.random.default_rng(seed)
    while True:
        coeffs = np.zeros((1, dim, dim), dtype=complex)
        coeffs[0] = np.eye(dim)
        for step in range(2 * dim if dim > 1 else 0):
            i, j = rng.choice(dim, size=2, replace=False)
            q = _complex_box(rng, degree + 1)
            trans = np.zeros((degree + 1, dim, dim), dtype=complex)
            trans[0] = np.eye(dim)
            trans[:, i, j] += q
            coeffs = _poly_trim(_poly_matmul(coeffs, trans))
        scale = _complex_box(rng, dim)
        small = np.abs(scale) < 0.3
        scale[small] = scale[small] + 0.5 + 0.5j  # keep diagonal constants away from zero
        coeffs = coeffs * scale[None, None, :]
        factor = UnimodularFactor(coeffs)
        if np.linalg.cond(factor(0.0)) <= _COND_CAP:
            return factor


@dataclass(frozen=True)
class SynthFamily(FamilyHandle):
    """Unimodular sandwich with its prescribed exponent multiset attached."""

    exponents: tuple[int, ...] = ()
    spec: SynthSpec | None = None


def synth_family(spec: SynthSpec) -> SynthFamily:
    """F(lambda) = U1 * diag((lambda - center)^{k_l}) * U2 with known exponents."""
    seq = np.random.SeedSequence(spec.seed)
    seed1, seed2 = seq.spawn(2)
    u1 = make_unimodular(spec.dim, spec.degree, seed1)
    u2 = make_unimodular(spec.dim, spec.degree, seed2)
    exps = np.array(spec.exponents, dtype=float)
    center = complex(spec.center)

    def evaluate(lam: complex) -> np.ndarray:
        w = complex(lam) - center
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.power(np.complex128(w), exps)
        return (u1(w) * d[None, :]) @ u2(w)

    return SynthFamily(
        dim=spec.dim,
        evaluate=evaluate,
        label=f"synth(dim={spec.dim}, exponents={list(spec.exponents)}, seed={spec.seed})",
        exponents=tuple(sorted(spec.exponents)),
        spec=spec,
    )


@dataclass(frozen=True)
class EigenFamily(FamilyHandle):
    """Eigenvalue-type family: rank-``multiplicity`` first-order pole at lambda_e."""

    multiplicity: int = 0
    lambda_e: complex = 0.0
    n: int = 0


def synth_eigen_family(spec: ResonanceSpec) -> EigenFamily:
    """(2*lambda_e - n)^{-1} (lambda - lambda_e)^{-1} * sum phi_k (x) phi_k + H(lambda).

    The phi_k are seeded orthonormal columns, H is a seeded low-degree
    polynomial holomorphic part; the result is complex-symmetric and the
    residue of (n - 2*lambda) * F at lambda_e has rank exactly ``rank``.
    """
    m, p, n = spec.ambient_dim, spec.rank, spec.n
    if not 1 <= p <= m:
        raise DomainError(f"rank must satisfy 1 <= rank <= ambient_dim, got {p}")
    lam_e = complex(spec.lambda_e)
    if lam_e == n / 2:
        raise DomainError("lambda_e = n/2 is excluded (prefactor (2*lambda_e - n) vanishes)")
    rng = np.random.default_rng(spec.seed)
    q, r = np.linalg.qr(_complex_box(rng, (m, m)) + 2.0 * np.eye(m))
    phi = q[:, :p]
    if np.min(np.abs(np.diag(r)[:p])) < 1e-10:
        raise DomainError("generated eigenvectors are not independent; change the seed")
    residue_core = phi @ phi.T  # complex-symmetric, rank p
    h_coeffs = _complex_box(rng, (3, m, m))
    h_coeffs = 0.5 * (h_coeffs + np.transpose(h_coeffs, (0, 2, 1)))
    pref = 1.0 / (2.0 * lam_e - n)

    def evaluate(lam: complex) -> np.ndarray:
        w = complex(lam) - lam_e
        h = (h_coeffs[2] * w + h_coeffs[1]) * w + h_coeffs[0]
        return residue_core * (pref / w) + h

    return EigenFamily(
        dim=m,
        evaluate=evaluate,
        label=f"eigen(p={p}, lambda_e={lam_e}, seed={spec.seed})",
        multiplicity=p,
        lambda_e=lam_e,
        n=n,
    )


@dataclass(frozen=True)
class ResolventFamily(FamilyHandle):
    """Resolvent-type family with finite-rank polar part in z - z(lambda0)."""

    multiplicity: int = 0
    lambda0: complex = 0.0
    n: int = 0
    z_exponents: tuple[int, ...] = ()


def _conditioned_matrix(rng: np.random.Generator, size: int) -> np.ndarray:
    while True:
        c = _complex_box(rng, (size, size)) + 1.5 * np.eye(size)
        if np.linalg.cond(c) <= _COND_CAP:
            return c


def _exact_z_residue(
    f1: np.ndarray, f2: np.ndarray, projs: list[np.ndarray], k_list: tuple[int, ...]
) -> np.ndarray:
    # residue in the z variable of F1(z) (sum (z-z0)^{k_j} P_j) F2(z):
    # coefficient extraction from the polynomial Taylor data, no quadrature.
    size = projs[0].shape[0]
    res = np.zeros((size, size), dtype=complex)
    for proj, k in zip(projs, k_list):
        for a in range(-k):
            b = -k - 1 - a
            if a < f1.shape[0] and b < f2.shape[0]:
                res += f1[a] @ proj @ f2[b]
    return res


def synth_resolvent_family(spec: ResonanceSpec) -> ResolventFamily:
    """Finite-rank polar shape tPhi F1 (sum (z - z0)^{k_j} P_j) F2 Phi + H(lambda).

    z(lambda) = lambda*(n - lambda), all z_exponents negative; Phi has full
    row rank q = sum |k_j| and the P_j are mutually orthogonal rank-one
    projections. The multiplicity of the pole (rank of the residue of
    (n - 2*lambda) * R at lambda0) is exactly q, validated at construction
    from the exact Taylor data.
    """
    m, n = spec.ambient_dim, spec.n
    k_list = tuple(spec.z_exponents)
    if not k_list or any(k >= 0 for k in k_list):
        raise DomainError("z_exponents must be a nonempty multiset of negative integers")
    lam0 = complex(spec.lambda0)
    if lam0 == n / 2:
        raise DomainError("lambda0 = n/2 is excluded (z is not locally invertible there)")
    q = sum(-k for k in k_list)
    if q > m:
        raise DomainError(f"ambient_dim = {m} too small for total polar rank q = {q}")
    z0 = lam0 * (n - lam0)
    deg = max(-k for k in k_list) + 1
    rng = np.random.default_rng(spec.seed)

    for _ in range(64):
        f1 = np.concatenate(
            [_conditioned_matrix(rng, q)[None], _complex_box(rng, (deg, q, q))], axis=0
        )
        f2 = np.concatenate(
            [_conditioned_matrix(rng, q)[None], _complex_box(rng, (deg, q, q))], axis=0
        )
        phi = _complex_box(rng, (q, m))
        basis, _ = np.linalg.qr(_complex_box(rng, (q, q)))
        projs = [np.outer(basis[:, j], basis[:, j].conj()) for j in range(len(k_list))]
        core_res = _exact_z_residue(f1, f2, projs, k_list)
        residue = phi.T @ core_res @ phi
        svals = np.linalg.svd(residue, compute_uv=False)
        if svals[q - 1] > 1e-6 * svals[0]:
            break
    else:
        raise DomainError("could not generate a well-conditioned rank-q residue; change seed")

    h_coeffs = _complex_box(rng, (3, m, m))

    def evaluate(lam: complex) -> np.ndarray:
        lam = complex(lam)
        zc = lam * (n - lam) - z0
        w = lam - lam0
        fa = np.zeros((q, q), dtype=complex)
        fb = np.zeros((q, q), dtype=complex)
        for d in range(deg, -1, -1):
            fa = fa * zc + f1[d]
            fb = fb * zc + f2[d]
        with np.errstate(divide="ignore", invalid="ignore"):
            inner = sum(
                (zc ** float(k)) * proj for proj, k in zip(projs, k_list)
            )
        h = (h_coeffs[2] * w + h_coeffs[1]) * w + h_coeffs[0]
        return phi.T @ (fa @ inner @ fb) @ phi + h

    return ResolventFamily(
        dim=m,
        evaluate=evaluate,
        label=f"resolvent(q={q}, lambda0={lam0}, seed={spec.seed})",
        multiplicity=q,
        lambda0=lam0,
        n=n,
        z_exponents=k_list,
    )
