"""Finite-dimensional operator subspaces, their orbits through a point, and
scaled operator-norm balls.

A subspace is spanned by k linearly independent matrices B_1..B_k. The orbit
of x is {M x : M in the span}; the scaled ball at level n keeps only
operators with spectral norm at most n. Membership uses the relative band
sigma1(M) <= n * (1 + mem_tol).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .defaults import MEM_TOL, NET_CAP, RANK_TOL
from .errors import DependentBasisError, DimensionError, NetTooLargeError


@dataclass(frozen=True, eq=False)
class OperatorSubspace:
    """Span of k independent operators on R^dim.

    ortho is a Frobenius-orthonormal re-combination of the basis and
    upper_tri the change of basis: basis coefficients c relate to ortho
    coefficients via c_ortho = upper_tri @ c.
    """

    basis: tuple[np.ndarray, ...]
    dim: int
    k: int
    ortho: tuple[np.ndarray, ...]
    upper_tri: np.ndarray

    def matrix(self, coeffs) -> np.ndarray:
        c = np.asarray(coeffs, dtype=float)
        if c.shape != (self.k,):
            raise DimensionError(f"expected {self.k} coefficients, got shape {c.shape}")
        return np.einsum("k,kij->ij", c, np.stack(self.basis))

    def ortho_matrix(self, coeffs) -> np.ndarray:
        c = np.asarray(coeffs, dtype=float)
        return np.einsum("k,kij->ij", c, np.stack(self.ortho))

    def to_ortho_coeffs(self, coeffs) -> np.ndarray:
        return self.upper_tri @ np.asarray(coeffs, dtype=float)

    def from_ortho_coeffs(self, coeffs) -> np.ndarray:
        return np.linalg.solve(self.upper_tri, np.asarray(coeffs, dtype=float))


@dataclass(frozen=True, eq=False)
class OrbitGeometry:
    """Orbit data of a subspace through x: images of the basis, an
    orthonormal basis Q of their span W, and the orthogonal projector P."""

    x: np.ndarray
    orbit_basis: tuple[np.ndarray, ...]
    Q: tuple[np.ndarray, ...]
    P: np.ndarray
    rank: int


@dataclass(frozen=True, eq=False)
class ScaledBall:
    """The level-n ball of a subspace: operators in the span with
    spectral norm at most n."""

    subspace: OperatorSubspace
    n: float

    def contains_coeffs(self, coeffs, mem_tol: float = MEM_TOL) -> bool:
        sigma = linalg.spectral_norm(self.subspace.matrix(coeffs))
        return sigma <= self.n * (1.0 + mem_tol)

    def contains(self, M, mem_tol: float = MEM_TOL) -> bool:
        return linalg.spectral_norm(np.asarray(M, dtype=float)) <= self.n * (1.0 + mem_tol)


def make_subspace(basis, rank_tol: float = RANK_TOL) -> OperatorSubspace:
    """Validate a matrix basis and build an OperatorSubspace.

    Rejects dimension mismatches and linearly dependent bases; the error
    names the first offending basis index.
    """
    mats = [linalg.as_matrix(B, square=True) for B in basis]
    if not mats:
        raise DimensionError("basis must contain at least one matrix")
    dim = mats[0].shape[0]
    for i, B in enumerate(mats):
        if B.shape != (dim, dim):
            raise DimensionError(f"basis[{i}] has shape {B.shape}, expected {(dim, dim)}")
    max_norm = max(float(np.linalg.norm(B)) for B in mats)
    if max_norm == 0.0:
        raise DependentBasisError("basis[0] is zero", index=0)
    threshold = rank_tol * max_norm
    ortho: list[np.ndarray] = []
    cols = []
    for i, B in enumerate(mats):
        w = B.astype(float, copy=True)
        coeff = np.zeros(len(mats))
        for _ in range(2):
            for j, Q in enumerate(ortho):
                c = float(np.tensordot(Q, w))
                coeff[j] += c
                w -= c * Q
        nw = float(np.linalg.norm(w))
        if nw <= threshold:
            raise DependentBasisError(
                f"basis[{i}] lies in the span of basis[0..{i - 1}] "
                f"(residual {nw:.3e} <= {threshold:.3e})", index=i)
        coeff[len(ortho)] = nw
        ortho.append(w / nw)
        cols.append(coeff)
    k = len(mats)
    # columns give B_j = sum_i R[i, j] * ortho_i with R upper triangular
    R = np.zeros((k, k))
    for j, coeff in enumerate(cols):
        R[:, j] = coeff[:k]
    return OperatorSubspace(
        basis=tuple(B.copy() for B in mats), dim=dim, k=k,
        ortho=tuple(ortho), upper_tri=R)


def orbit(subspace: OperatorSubspace, x, rank_tol: float = RANK_TOL) -> OrbitGeometry:
    """Orbit geometry of the subspace through x: basis images B_i x, an
    orthonormal basis of their span and the orthogonal projector onto it."""
    xv = linalg.as_vector(x)
    if xv.shape != (subspace.dim,):
        raise DimensionError(f"x has shape {xv.shape}, expected ({subspace.dim},)")
    images = [B @ xv for B in subspace.basis]
    Q, rank = linalg.orthonormalize(images, rank_tol)
    P = np.zeros((subspace.dim, subspace.dim))
    for q in Q:
        P += np.outer(q, q)
    return OrbitGeometry(x=xv.copy(), orbit_basis=tuple(images), Q=tuple(Q), P=P, rank=rank)


def op_norm(subspace: OperatorSubspace, coeffs, tol: float = 1e-12) -> float:
    """Spectral norm of sum_i coeffs_i B_i."""
    return linalg.spectral_norm(subspace.matrix(coeffs), tol)


def _dual_basis(subspace: OperatorSubspace) -> list[np.ndarray]:
    """Dual basis in the span: <D_i, B_j>_F = delta_ij."""
    stack = np.stack(subspace.basis)
    G = np.einsum("aij,bij->ab", stack, stack)
    Ginv = np.linalg.solve(G, np.eye(subspace.k))
    return [np.einsum("j,jab->ab", Ginv[i], stack) for i in range(subspace.k)]


def coefficient_box(subspace: OperatorSubspace, n: float) -> np.ndarray:
    """Per-axis bounds R_i with |c_i| <= R_i for every coefficient vector of
    an operator with spectral norm <= n.

    Uses the trace-duality bound |c_i| = |<M, D_i>_F| <= sigma1(M) * ||D_i||_nuclear
    with D_i the dual basis, which is tight for orthonormal bases.
    """
    duals = _dual_basis(subspace)
    return np.array([n * linalg.nuclear_norm(D) for D in duals])


def _axis_grid(bound: float, step: float) -> np.ndarray:
    intervals = max(1, int(np.ceil(2.0 * bound / step)))
    return np.linspace(-bound, bound, intervals + 1)


def epsilon_net(subspace: OperatorSubspace, x, n: float, eps: float,
                cap: int = NET_CAP, mem_tol: float = MEM_TOL) -> list[np.ndarray]:
    """Finite eps-cover of the level-n orbit ball {M x : sigma1(M) <= n}.

    Grids the coefficient box, keeps grid points inside the ball and pulls
    slightly-outside ones back to the boundary by scaling, so every returned
    point is a member. Raises NetTooLargeError with a size estimate when the
    grid would exceed the cap.
    """
    xv = linalg.as_vector(x)
    if eps <= 0.0:
        raise DimensionError("eps must be positive")
    image_norms = np.array([float(np.linalg.norm(B @ xv)) for B in subspace.basis])
    lmax = float(image_norms.max())
    if lmax == 0.0 or n * float(np.linalg.norm(xv)) <= eps:
        # the whole ball maps within eps of the origin
        return [np.zeros(subspace.dim)]
    k = subspace.k
    l2 = float(np.sqrt(np.sum(image_norms ** 2)))
    step = min(eps / (np.sqrt(k) * lmax), 2.0 * 0.95 * eps / (l2 * np.sqrt(k)))
    bounds = coefficient_box(subspace, n)
    axes = [_axis_grid(b, step) for b in bounds]
    size = 1
    for a in axes:
        size *= len(a)
    if size > cap:
        raise NetTooLargeError(
            f"epsilon net needs about {size} grid points (cap {cap}); "
            f"coarsen eps or lower n", required_size=size)
    mesh = np.meshgrid(*axes, indexing="ij")
    coeffs = np.stack([m.ravel() for m in mesh], axis=1)
    stack = np.stack(subspace.basis)
    mats = np.einsum("pk,kij->pij", coeffs, stack)
    sigmas = linalg.batch_spectral_norms(mats)
    # operator-norm growth per unit coefficient step, for the boundary band
    op_lip = float(np.sqrt(sum(linalg.spectral_norm(B) ** 2 for B in subspace.basis)))
    band = n + op_lip * step * np.sqrt(k)
    keep = sigmas <= n * (1.0 + mem_tol)
    rescale = (~keep) & (sigmas <= band)
    points = [mats[keep] @ xv] if np.any(keep) else []
    if np.any(rescale):
        scaled = mats[rescale] * (n / sigmas[rescale])[:, None, None]
        points.append(scaled @ xv)
    if not points:
        return [np.zeros(subspace.dim)]
    out = np.concatenate(points, axis=0)
    return [out[i] for i in range(out.shape[0])]


def covering_gap(subspace: OperatorSubspace, x, n: float, net,
                 samples: int = 10_000, seed: int = 0) -> float:
    """Largest distance from a sampled orbit-ball member to the net
    (the verification half of the epsilon_net contract)."""
    xv = linalg.as_vector(x)
    rng = np.random.default_rng(seed)
    bounds = coefficient_box(subspace, n)
    coeffs = rng.uniform(-1.0, 1.0, size=(samples, subspace.k)) * bounds[None, :]
    stack = np.stack(subspace.basis)
    mats = np.einsum("pk,kij->pij", coeffs, stack)
    sigmas = linalg.batch_spectral_norms(mats)
    scale = np.minimum(1.0, n / np.maximum(sigmas, 1e-300))
    members = (mats * scale[:, None, None]) @ xv
    net_arr = np.asarray(net, dtype=float)
    worst = 0.0
    chunk = 2048
    for start in range(0, members.shape[0], chunk):
        block = members[start:start + chunk]
        d2 = ((block[:, None, :] - net_arr[None, :, :]) ** 2).sum(axis=2)
        worst = max(worst, float(np.sqrt(d2.min(axis=1).max())))
    return worst
