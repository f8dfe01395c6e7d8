"""Small dense linear algebra used by the internal model and the validators.

Matrices and vectors are plain ``numpy`` float arrays. Everything here is
meant for n <= ~12, so clarity wins over speed.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateRow, NotHurwitz, SingularMatrix

PIVOT_TOL = 1e-12


def _as_matrix(A) -> np.ndarray:
    A = np.array(A, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    return A


def _lu_solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # Gaussian elimination with partial pivoting on a copy; B may hold several columns.
    A = A.copy()
    B = B.copy()
    n = A.shape[0]
    for col in range(n):
        p = col + int(np.argmax(np.abs(A[col:, col])))
        if abs(A[p, col]) < PIVOT_TOL:
            raise SingularMatrix(f"pivot {A[p, col]:.3e} in column {col}")
        if p != col:
            A[[col, p]] = A[[p, col]]
            B[[col, p]] = B[[p, col]]
        factors = A[col + 1:, col] / A[col, col]
        A[col + 1:, col:] -= np.outer(factors, A[col, col:])
        B[col + 1:] -= np.outer(factors, B[col]) if B.ndim == 2 else factors * B[col]
    X = np.zeros_like(B)
    for row in range(n - 1, -1, -1):
        X[row] = (B[row] - A[row, row + 1:] @ X[row + 1:]) / A[row, row]
    return X


def solve_linear(A, b) -> np.ndarray:
    """Solve ``A x = b`` for square ``A`` by partially pivoted elimination.

    Raises SingularMatrix when a pivot falls below 1e-12 in magnitude.
    """
    A = _as_matrix(A)
    b = np.array(b, dtype=float)
    if A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    if b.shape[0] != A.shape[0]:
        raise ValueError("dimension mismatch between A and b")
    return _lu_solve(A, b)


def inv(A) -> np.ndarray:
    A = _as_matrix(A)
    return _lu_solve(A, np.eye(A.shape[0]))


def companion(coeffs) -> np.ndarray:
    """Companion matrix with identity in the upper-right block.

    The last row is ``(-c_1, ..., -c_n)``, so ``c_1`` is the constant
    coefficient of the characteristic polynomial
    ``s^n + c_n s^(n-1) + ... + c_2 s + c_1``.
    """
    c = np.atleast_1d(np.array(coeffs, dtype=float))
    n = c.size
    if n < 1:
        raise ValueError("need at least one coefficient")
    C = np.zeros((n, n))
    C[:-1, 1:] = np.eye(n - 1)
    C[-1, :] = -c
    return C


def charpoly(A) -> np.ndarray:
    """Characteristic polynomial of ``A`` in descending powers (leading 1).

    Faddeev-LeVerrier recursion; exact enough for the small matrices here.
    """
    A = _as_matrix(A)
    n = A.shape[0]
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    Mk = np.zeros_like(A)
    I = np.eye(n)
    for k in range(1, n + 1):
        Mk = A @ Mk + coeffs[k - 1] * I
        coeffs[k] = -np.trace(A @ Mk) / k
    return coeffs


def routh_array(coeffs) -> list[np.ndarray]:
    """Rows of the Routh array for a polynomial in descending powers.

    Raises DegenerateRow when a row vanishes identically.
    """
    c = np.array(coeffs, dtype=float)
    deg = c.size - 1
    width = deg // 2 + 1
    r0 = np.zeros(width)
    r1 = np.zeros(width)
    r0[: len(c[0::2])] = c[0::2]
    r1[: len(c[1::2])] = c[1::2]
    rows = [r0, r1]
    scale = max(1.0, float(np.max(np.abs(c))))
    for i in range(2, deg + 1):
        prev2, prev = rows[-2], rows[-1]
        if np.all(np.abs(prev) <= PIVOT_TOL * scale):
            raise DegenerateRow(f"row {i - 1} of the Routh array is identically zero")
        if prev[0] == 0.0:
            # first-column zero without a zero row: sign change, so not stable;
            # callers only need the sign pattern, which is already decided.
            rows.append(np.full(width, np.nan))
            return rows
        new = np.zeros(width)
        for j in range(width - 1):
            new[j] = (prev[0] * prev2[j + 1] - prev2[0] * prev[j + 1]) / prev[0]
        rows.append(new)
    if deg >= 1 and np.all(np.abs(rows[-1]) <= PIVOT_TOL * scale):
        raise DegenerateRow(f"row {deg} of the Routh array is identically zero")
    return rows


def routh_hurwitz_stable(coeffs_monic) -> bool:
    """True iff every root of the monic polynomial has negative real part.

    ``coeffs_monic`` is in descending powers with leading coefficient 1,
    e.g. ``[1, 2, 1]`` for ``s^2 + 2s + 1``.  A vanishing Routh row (roots
    on the imaginary axis) raises DegenerateRow.
    """
    c = np.array(coeffs_monic, dtype=float)
    if c.size == 0 or abs(c[0] - 1.0) > 1e-12:
        raise ValueError("polynomial must be monic (leading coefficient 1)")
    if c.size == 1:
        return True
    rows = routh_array(c)
    first = np.array([r[0] for r in rows])
    return bool(np.all(np.isfinite(first)) and np.all(first > 0))


def is_hurwitz(A) -> bool:
    """Matrix version of the Routh test; imaginary-axis spectra count as unstable."""
    try:
        return routh_hurwitz_stable(charpoly(A))
    except DegenerateRow:
        return False


def lyapunov_solve(F) -> np.ndarray:
    """Solve ``P F + F^T P = -I`` through the n^2 x n^2 vectorized system."""
    F = _as_matrix(F)
    n = F.shape[0]
    if F.shape != (n, n):
        raise ValueError("F must be square")
    if not is_hurwitz(F):
        raise NotHurwitz("lyapunov_solve needs a Hurwitz matrix")
    I = np.eye(n)
    # row-major vec: vec(P F) = (I kron F^T) vec(P), vec(F^T P) = (F^T kron I) vec(P)
    L = np.kron(I, F.T) + np.kron(F.T, I)
    p = solve_linear(L, -I.reshape(-1))
    P = p.reshape(n, n)
    return 0.5 * (P + P.T)


def _trim(p: np.ndarray, tol: float) -> np.ndarray:
    nz = np.flatnonzero(np.abs(p) > tol)
    return p[nz[0]:] if nz.size else np.zeros(1)


def _sturm_sign_changes(seq: list[np.ndarray], x: float) -> int:
    if np.isinf(x):
        # sign of the leading term at -inf / +inf
        vals = [p[0] * (np.sign(x) ** (p.size - 1)) for p in seq]
    else:
        vals = [np.polyval(p, x) for p in seq]
    vals = [v for v in vals if v != 0.0]
    return sum(1 for a, b in zip(vals, vals[1:]) if a * b < 0)


def _count_distinct_negative_roots(q: np.ndarray) -> int:
    """Distinct real roots of ``q`` in (-inf, 0) via a Sturm sequence."""
    scale = max(1.0, float(np.max(np.abs(q))))
    tol = 1e-10 * scale
    seq = [q, np.polyder(q)]
    while seq[-1].size > 1:
        _, r = np.polydiv(seq[-2], seq[-1])
        r = _trim(-r, tol)
        if r.size == 1 and abs(r[0]) <= tol:
            break
        seq.append(r)
    return _sturm_sign_changes(seq, -np.inf) - _sturm_sign_changes(seq, 0.0)


def eig_imaginary_distinct(S) -> bool:
    """True iff every eigenvalue of ``S`` is simple and purely imaginary.

    Works on the characteristic polynomial only: such a polynomial is
    ``s^r * prod(s^2 + w_i^2)`` with r in {0, 1} and distinct w_i > 0, so it
    must be even or odd in s and, after substituting x = s^2, have distinct
    roots on the negative real axis.
    """
    S = _as_matrix(S)
    p = charpoly(S)
    deg = p.size - 1
    scale = max(1.0, float(np.max(np.abs(p))))
    tol = 1e-10 * scale
    # p[i] multiplies s^(deg - i); coefficients of the wrong parity must vanish
    wrong = p[1::2]
    if np.any(np.abs(wrong) > tol):
        return False
    if deg % 2 == 1:
        # odd polynomial: factor out s, remainder must not vanish at 0
        even_part = p[:-1]
    else:
        even_part = p
    q = even_part[0::2]  # polynomial in x = s^2, descending
    if abs(q[-1]) <= tol:
        return False  # repeated zero root
    if q.size == 1:
        return True
    return _count_distinct_negative_roots(q) == q.size - 1
