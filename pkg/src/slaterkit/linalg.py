"""Dense complex linear-algebra kernels.

Canonical forms under unitary congruence for antisymmetric (Youla) and
symmetric (Takagi) matrices, the Pfaffian, contractions of coefficient
matrices with Levi-Civita tensors, and seeded Haar sampling.  Everything
here is a pure function of its inputs; randomness enters only through an
explicitly passed generator.

Conventions
-----------
A congruence canonical form is a unitary ``U`` such that ``U @ m @ U.T``
is block diagonal: ``diag[Z(z_1), ..., Z(z_r), 0]`` with
``Z(z) = [[0, z], [-z, 0]]`` for antisymmetric input, and
``diag(z_1, ..., z_r, 0, ..., 0)`` for symmetric input.  The values
``z_i`` are real, positive and sorted in descending order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ArityMismatchError,
    NotAntisymmetricError,
    NotSymmetricError,
    NumericalFailureError,
    OddDimensionError,
    ValidationError,
)

#: entrywise tolerance for claimed symmetry properties
TOL_SYM = 1e-10
#: reconstruction tolerance for canonical forms (absolute, at unit scale)
TOL_RECON = 1e-9
#: numerical rank threshold, relative to the largest singular value
RANK_RTOL = 1e-8
#: relative tolerance below which a Levi-Civita contraction counts as zero
CONTRACT_RTOL = 1e-8

_MAX_CONTRACTION_TERMS = 20_000_000


# ---------------------------------------------------------------------------
# validation helpers
# ---------------------------------------------------------------------------

def as_complex_matrix(m) -> np.ndarray:
    """Coerce to a finite, square complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix contains NaN or Inf entries")
    return a


def max_abs(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def require_antisymmetric(w: np.ndarray, tol: float = TOL_SYM) -> None:
    dev = max_abs(w + w.T)
    if dev > tol:
        raise NotAntisymmetricError(f"max |w + w^T| = {dev:.3e} exceeds tol {tol:.1e}")


def require_symmetric(v: np.ndarray, tol: float = TOL_SYM) -> None:
    dev = max_abs(v - v.T)
    if dev > tol:
        raise NotSymmetricError(f"max |v - v^T| = {dev:.3e} exceeds tol {tol:.1e}")


def require_hermitian(h: np.ndarray, tol: float = TOL_SYM) -> None:
    dev = max_abs(h - h.conj().T)
    if dev > tol:
        raise ValidationError(f"max |h - h^dag| = {dev:.3e} exceeds tol {tol:.1e}")


def require_unitary(u: np.ndarray, tol: float = 1e-9) -> None:
    dev = max_abs(u @ u.conj().T - np.eye(u.shape[0]))
    if dev > tol:
        raise ValidationError(f"max |u u^dag - 1| = {dev:.3e} exceeds tol {tol:.1e}")


def singular_values(m) -> np.ndarray:
    """Singular values, non-negative and sorted in descending order."""
    return np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)


def numerical_rank(m, rtol: float = RANK_RTOL) -> int:
    """Number of singular values above ``rtol`` times the largest one."""
    s = singular_values(m)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


# ---------------------------------------------------------------------------
# seeded Haar sampling
# ---------------------------------------------------------------------------

def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix.

    The diagonal of R is phase-normalized so the distribution is exactly
    Haar rather than QR-convention dependent.
    """
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    ph = d / np.abs(d)
    return q * ph


def haar_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random unit vector in C^dim."""
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def as_rng(seed) -> np.random.Generator:
    """Pass generators through, turn ints/None into a fresh generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# canonical forms under unitary congruence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CongruenceCanonicalForm:
    """Result of a congruence diagonalization ``U @ m @ U.T = canonical``.

    Attributes
    ----------
    transform:
        Unitary ``U`` realizing the canonical form.
    values:
        Canonical values ``z_i``, real positive, descending.
    residual:
        Max-norm deviation of ``U @ m @ U.T`` from the exact canonical
        matrix built from ``values``.
    """

    transform: np.ndarray
    values: np.ndarray
    residual: float

    @property
    def rank(self) -> int:
        return len(self.values)


def _cluster_by_gap(z: np.ndarray, atol: float) -> list[list[int]]:
    """Group indices of a descending array into clusters of nearby values."""
    groups: list[list[int]] = []
    for i in range(len(z)):
        if groups and z[groups[-1][-1]] - z[i] <= atol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _orthonormal_complement(used: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis of the complement of the columns of ``used``."""
    if used.shape[1] == 0:
        return np.eye(dim, dtype=complex)
    proj = np.eye(dim, dtype=complex) - used @ used.conj().T
    evals, evecs = np.linalg.eigh(proj)
    keep = evals > 0.5
    return evecs[:, keep]


def youla_canonical(w, tol: float = TOL_SYM, rank_rtol: float = RANK_RTOL) -> CongruenceCanonicalForm:
    """Canonical form of a complex antisymmetric matrix under congruence.

    Finds a unitary ``U`` with ``U @ w @ U.T = diag[Z_1, ..., Z_r, 0]``,
    each ``Z_i = [[0, z_i], [-z_i, 0]]`` with ``z_i > 0`` descending.

    The construction diagonalizes the Gram matrix ``w^dag w``, whose
    positive eigenvalues come in degenerate pairs ``z_i^2``, and pairs up
    each (clustered) eigenspace through the bilinear form restricted to it.

    Raises
    ------
    NotAntisymmetricError
        If ``max|w + w^T|`` exceeds ``tol``.
    NumericalFailureError
        If the reconstruction residual exceeds the tolerance.
    """
    w = as_complex_matrix(w)
    require_antisymmetric(w, tol)
    n = w.shape[0]
    if n == 0:
        return CongruenceCanonicalForm(np.eye(0, dtype=complex), np.array([]), 0.0)

    # right-singular vectors span the eigenspaces of w^dag w with singular
    # values accurate to machine epsilon (sqrt of Gram eigenvalues is not)
    _, z, vh = np.linalg.svd(w)
    vecs = vh.conj().T
    smax = z[0]
    thr = rank_rtol * smax
    cluster_atol = max(TOL_RECON, 1e3 * np.finfo(float).eps) * max(smax, 1.0)

    nonzero = [i for i in range(n) if z[i] > thr]
    column_blocks: list[np.ndarray] = []
    for group in _cluster_by_gap(z[: len(nonzero)], cluster_atol):
        m2 = len(group)
        if m2 % 2:
            raise NumericalFailureError(
                f"odd-sized singular cluster of size {m2} at z ~ {z[group[0]]:.3e}"
            )
        sub = vecs[:, group]
        bil = sub.T @ w @ sub  # antisymmetric, bil @ bil^dag ~ z^2 * 1
        pairs: list[np.ndarray] = []
        used = np.zeros((m2, 0), dtype=complex)
        while used.shape[1] < m2:
            rem = _orthonormal_complement(used, m2)
            u = rem[:, 0]
            partner = -np.conj(bil @ u)
            # numerically re-orthogonalize against everything already used
            for c in itertools.chain(pairs, [u]):
                partner = partner - c * (c.conj() @ partner)
            partner = partner / np.linalg.norm(partner)
            pairs.extend([u, partner])
            used = np.column_stack([used, u, partner])
        column_blocks.append(sub @ np.column_stack(pairs))

    kernel = vecs[:, len(nonzero):]
    phi = np.column_stack(column_blocks + [kernel]) if column_blocks else kernel

    r = len(nonzero) // 2
    probe = phi.T @ w @ phi
    values = np.array([probe[2 * i, 2 * i + 1].real for i in range(r)])
    # near-degenerate merged clusters can come out marginally unordered
    perm = np.argsort(-values, kind="stable")
    if not np.array_equal(perm, np.arange(r)):
        cols = np.arange(n)
        for slot, src in enumerate(perm):
            cols[2 * slot], cols[2 * slot + 1] = 2 * src, 2 * src + 1
        phi = phi[:, cols]
        values = values[perm]
    # deterministic phases: opposite rotations inside a pair leave the
    # canonical block invariant, kernel columns carry a free phase
    for i in range(r):
        a = phi[:, 2 * i]
        ph = a[int(np.argmax(np.abs(a)))]
        rot = ph / abs(ph)
        phi[:, 2 * i] = a / rot
        phi[:, 2 * i + 1] = phi[:, 2 * i + 1] * rot
    for j in range(2 * r, n):
        c = phi[:, j]
        ph = c[int(np.argmax(np.abs(c)))]
        if abs(ph) > 0:
            phi[:, j] = c / (ph / abs(ph))

    u_out = phi.T
    canon = u_out @ w @ u_out.T
    target = np.zeros((n, n), dtype=complex)
    for i, zi in enumerate(values):
        target[2 * i, 2 * i + 1] = zi
        target[2 * i + 1, 2 * i] = -zi
    residual = max_abs(canon - target)
    if residual > TOL_RECON * max(1.0, smax):
        raise NumericalFailureError(f"Youla reconstruction residual {residual:.3e}")
    return CongruenceCanonicalForm(u_out, values, residual)


def _symmetric_unitary_factor(m: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Factor a complex symmetric unitary as ``m = O diag(e^{i theta}) O.T``.

    ``m`` unitary symmetric implies real and imaginary parts are commuting
    real symmetric matrices; they are jointly diagonalized by a real
    orthogonal ``O``.
    """
    x = np.ascontiguousarray(m.real)
    y = np.ascontiguousarray(m.imag)
    last_err = None
    for atol in (1e-9, 1e-7, 1e-5):
        ex, basis = np.linalg.eigh(x)
        o = basis.copy()
        # cluster consecutive eigenvalues as returned (ascending)
        start = 0
        while start < len(ex):
            stop = start + 1
            while stop < len(ex) and abs(ex[stop] - ex[stop - 1]) <= atol:
                stop += 1
            if stop - start > 1:
                sub = o[:, start:stop]
                _, q = np.linalg.eigh(sub.T @ y @ sub)
                o[:, start:stop] = sub @ q
            start = stop
        diag = o.T @ m @ o
        off = max_abs(diag - np.diag(np.diagonal(diag)))
        if off <= tol:
            theta = np.angle(np.diagonal(diag))
            return o, theta
        last_err = off
    raise NumericalFailureError(
        f"joint diagonalization of a symmetric unitary failed (off-diagonal {last_err:.3e})"
    )


def takagi_canonical(v, tol: float = TOL_SYM, rank_rtol: float = RANK_RTOL) -> CongruenceCanonicalForm:
    """Canonical form of a complex symmetric matrix under congruence.

    Finds a unitary ``U`` with ``U @ v @ U.T = diag(z_1, ..., z_r, 0, ...)``,
    ``z_i > 0`` descending.  Degenerate singular values are handled by a
    joint re-diagonalization inside each degenerate block.

    Raises
    ------
    NotSymmetricError, NumericalFailureError
    """
    v = as_complex_matrix(v)
    require_symmetric(v, tol)
    n = v.shape[0]
    if n == 0:
        return CongruenceCanonicalForm(np.eye(0, dtype=complex), np.array([]), 0.0)

    _, z, vh = np.linalg.svd(v)
    vecs = vh.conj().T
    smax = z[0]
    thr = rank_rtol * smax
    cluster_atol = max(TOL_RECON, 1e3 * np.finfo(float).eps) * max(smax, 1.0)

    nonzero = [i for i in range(n) if z[i] > thr]
    column_blocks: list[np.ndarray] = []
    for group in _cluster_by_gap(z[: len(nonzero)], cluster_atol):
        sub = vecs[:, group]
        zc = float(np.mean(z[group]))
        bil = sub.T @ v @ sub
        o, theta = _symmetric_unitary_factor(bil / zc, tol=1e-8)
        block = sub @ (o * np.exp(-0.5j * theta))
        column_blocks.append(block)

    kernel = vecs[:, len(nonzero):]
    phi = np.column_stack(column_blocks + [kernel]) if column_blocks else kernel
    probe = phi.T @ v @ phi
    values = np.diagonal(probe)[: len(nonzero)].real.copy()

    perm = np.argsort(-values, kind="stable")
    if not np.array_equal(perm, np.arange(len(values))):
        cols = np.arange(n)
        cols[: len(values)] = perm
        phi = phi[:, cols]
        values = values[perm]
    # sign normalization: flipping a column leaves the diagonal invariant
    for j in range(n):
        c = phi[:, j]
        ph = c[int(np.argmax(np.abs(c)))]
        if ph.real < 0 or (ph.real == 0 and ph.imag < 0):
            phi[:, j] = -c

    u_out = phi.T
    canon = u_out @ v @ u_out.T
    target = np.zeros((n, n), dtype=complex)
    target[: len(values), : len(values)] = np.diag(values)
    residual = max_abs(canon - target)
    if residual > TOL_RECON * max(1.0, smax):
        raise NumericalFailureError(f"Takagi reconstruction residual {residual:.3e}")
    return CongruenceCanonicalForm(u_out, values, residual)


# ---------------------------------------------------------------------------
# Pfaffian
# ---------------------------------------------------------------------------

def pfaffian(w, tol: float = TOL_SYM) -> complex:
    """Pfaffian of an even-dimensional antisymmetric matrix.

    Uses Parlett-Reid skew-symmetric tridiagonalization with partial
    pivoting, O(n^3).  Satisfies ``pfaffian(w)**2 == det(w)`` and
    ``pfaffian(Q w Q^T) == det(Q) pfaffian(w)``.

    Raises
    ------
    OddDimensionError, NotAntisymmetricError
    """
    w = as_complex_matrix(w)
    n = w.shape[0]
    if n % 2:
        raise OddDimensionError(f"Pfaffian requires even dimension, got {n}")
    require_antisymmetric(w, tol)
    if n == 0:
        return 1.0 + 0j

    a = w.copy()
    pf = 1.0 + 0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        piv = a[k, k + 1]
        if piv == 0:
            return 0j
        pf *= piv
        if k + 2 < n:
            tau = a[k, k + 2:] / piv
            col = a[k + 2:, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return complex(pf)


# ---------------------------------------------------------------------------
# Levi-Civita contractions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EpsilonContractionSpec:
    """Contraction of coefficient matrices with Levi-Civita tensors.

    Two patterns cover the rank criteria for two-particle states:

    ``"single"``
        One epsilon of order ``d``; operand ``k`` occupies index slots
        ``(2k, 2k+1)`` and the trailing ``free_count`` slots stay free:
        ``sum_e eps^{i1 i2 ... i_{2N} a1..am} W1[i1,i2] ... WN[..]``.
        Operands must be antisymmetric.
    ``"paired"``
        Two epsilons of order ``d`` sharing the free slots; operand ``k``
        puts its row index into slot ``k`` of the first epsilon and its
        column index into slot ``k`` of the second:
        ``sum eps^{i1 i3 .. a..} eps^{i2 i4 .. a..} W1[i1,i2] W2[i3,i4] ...``.
        Operands must be symmetric.
    """

    operands: tuple[np.ndarray, ...]
    pattern: str = "single"
    free_count: int = 0


def _perm_sign(seq) -> int:
    sign = 1
    seq = tuple(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _matchings(items: tuple[int, ...]):
    """All partitions of ``items`` into increasing pairs."""
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for i, other in enumerate(rest):
        for tail in _matchings(rest[:i] + rest[i + 1:]):
            yield ((first, other),) + tail


_single_cache: dict = {}
_paired_cache: dict = {}


def _single_table(d: int, n_ops: int, free_count: int):
    key = (d, n_ops, free_count)
    if key in _single_cache:
        return _single_cache[key]
    contracted = 2 * n_ops
    canonical = []
    for matching in _matchings(tuple(range(contracted))):
        for assignment in itertools.permutations(matching):
            flat = tuple(itertools.chain.from_iterable(assignment))
            canonical.append((assignment, _perm_sign(flat)))
    free_tuples = list(itertools.combinations(range(d), free_count))
    n_terms = len(free_tuples) * len(canonical)
    if n_terms > _MAX_CONTRACTION_TERMS:
        raise ValidationError(f"contraction would expand to {n_terms} terms")
    idx = np.empty((n_ops, n_terms), dtype=np.intp)
    sgn = np.empty(n_terms, dtype=np.int64)
    factor = 2 ** n_ops
    t = 0
    for alpha in free_tuples:
        rest = [i for i in range(d) if i not in alpha]
        base = _perm_sign(tuple(rest) + alpha) * factor
        for assignment, csign in canonical:
            for k, (a, b) in enumerate(assignment):
                idx[k, t] = rest[a] * d + rest[b]
            sgn[t] = base * csign
            t += 1
    table = (tuple(free_tuples), idx, sgn, len(canonical))
    _single_cache[key] = table
    return table


def _paired_table(d: int, n_ops: int, free_count: int):
    key = (d, n_ops, free_count)
    if key in _paired_cache:
        return _paired_cache[key]
    canonical = []
    for rho in itertools.permutations(range(n_ops)):
        s_rho = _perm_sign(rho)
        for tau in itertools.permutations(range(n_ops)):
            canonical.append((rho, tau, s_rho * _perm_sign(tau)))
    free_tuples = list(itertools.combinations(range(d), free_count))
    n_terms = len(free_tuples) * len(canonical)
    if n_terms > _MAX_CONTRACTION_TERMS:
        raise ValidationError(f"contraction would expand to {n_terms} terms")
    idx = np.empty((n_ops, n_terms), dtype=np.intp)
    sgn = np.empty(n_terms, dtype=np.int64)
    t = 0
    for alpha in free_tuples:
        rest = [i for i in range(d) if i not in alpha]
        for rho, tau, csign in canonical:
            for k in range(n_ops):
                idx[k, t] = rest[rho[k]] * d + rest[tau[k]]
            sgn[t] = csign
            t += 1
    table = (tuple(free_tuples), idx, sgn, len(canonical))
    _paired_cache[key] = table
    return table


def epsilon_contract(spec: EpsilonContractionSpec) -> dict[tuple[int, ...], complex]:
    """Evaluate a Levi-Civita contraction.

    Returns one complex value per strictly increasing assignment of the
    free indices (the empty tuple keys a fully contracted value).  Only
    index tuples supported by the epsilon tensor are visited, i.e. the
    contracted indices run over permutations of the complement of each
    free tuple.

    Raises
    ------
    ArityMismatchError
        If operand count, free indices and dimension are inconsistent
        with the epsilon order.
    """
    if not spec.operands:
        raise ArityMismatchError("need at least one operand")
    ops = [as_complex_matrix(m) for m in spec.operands]
    d = ops[0].shape[0]
    for m in ops:
        if m.shape[0] != d:
            raise ArityMismatchError("operands must share a common dimension")
    n_ops = len(ops)
    if spec.free_count < 0:
        raise ArityMismatchError("free_count must be non-negative")

    if spec.pattern == "single":
        if 2 * n_ops + spec.free_count != d:
            raise ArityMismatchError(
                f"single pattern needs 2*{n_ops} + {spec.free_count} == d = {d}"
            )
        for m in ops:
            require_antisymmetric(m)
        free_tuples, idx, sgn, t0 = _single_table(d, n_ops, spec.free_count)
    elif spec.pattern == "paired":
        if n_ops + spec.free_count != d:
            raise ArityMismatchError(
                f"paired pattern needs {n_ops} + {spec.free_count} == d = {d}"
            )
        for m in ops:
            require_symmetric(m)
        free_tuples, idx, sgn, t0 = _paired_table(d, n_ops, spec.free_count)
    else:
        raise ValidationError(f"unknown pattern {spec.pattern!r}")

    prod = sgn.astype(complex)
    for k, m in enumerate(ops):
        prod = prod * m.ravel()[idx[k]]
    values = prod.reshape(len(free_tuples), t0).sum(axis=1)
    return dict(zip(free_tuples, values.tolist()))
