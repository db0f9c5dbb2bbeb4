"""Umemura polynomials two ways: the bilinear recurrence and a Hankel determinant.

Recurrence (sigma_0 = sigma_1 = 1)::

    t*(s'' s - s'^2) + s' s + (t/8 - r + 3n/4) s^2 = sigma_{n+1} sigma_{n-1}

Determinant::

    sigma_n = t**(-n(n-1)/2) * det(a_{i+j-2})_{i,j=1..n}
    a_0 = 1, a_1 = 3t/4,
    a_n = t*(a'_{n-1} + 3/4 a_{n-1}) + t*(t/8 - r) * sum_{k=0}^{n-2} a_k a_{n-k-2}

``r`` is either the indeterminate (``r_mode="symbolic"``) or an exact rational.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InsufficientEntries
from .exact import BiPoly, as_rational, exact_div

SYMBOLIC = "symbolic"
T = BiPoly.t()

__all__ = [
    "SYMBOLIC",
    "EntrySequence",
    "HankelMatrix",
    "UmemuraCache",
    "CrossCheckRow",
    "CrossCheckReport",
    "parse_r_mode",
    "r_poly",
    "compute_entries",
    "build_hankel",
    "bareiss_det",
    "cofactor_det",
    "hankel_minors",
    "sigma_hankel",
    "sigma_recurrence",
    "sigma_recurrence_table",
    "rho",
    "verify_scaled_toda",
    "cross_check",
]


def parse_r_mode(r) -> object:
    """Normalise an r argument: "sym"/"symbolic"/None -> SYMBOLIC, else a Fraction."""
    if r is None or r == SYMBOLIC or r == "sym":
        return SYMBOLIC
    return as_rational(r)


def r_poly(r_mode) -> BiPoly:
    r_mode = parse_r_mode(r_mode)
    return BiPoly.r() if r_mode == SYMBOLIC else BiPoly.constant(r_mode)


@dataclass(frozen=True)
class EntrySequence:
    entries: tuple[BiPoly, ...]
    r_mode: object = SYMBOLIC

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, n):
        return self.entries[n]

    @property
    def N(self) -> int:
        return len(self.entries) - 1


@dataclass(frozen=True)
class HankelMatrix:
    n: int
    anti: tuple[BiPoly, ...]  # a_0 .. a_{2n-2}

    def __getitem__(self, ij):
        i, j = ij  # 1-based, as in det(a_{i+j-2})
        return self.anti[i + j - 2]

    def rows(self) -> list[list[BiPoly]]:
        return [[self.anti[i + j] for j in range(self.n)] for i in range(self.n)]


@dataclass
class UmemuraCache:
    """Append-only table of sigma_n with the method that produced each one."""

    r_mode: object = SYMBOLIC
    sigma: dict[int, BiPoly] = field(default_factory=dict)
    method: dict[int, str] = field(default_factory=dict)
    entries: list[BiPoly] = field(default_factory=list)

    @property
    def max_n(self) -> int:
        return max(self.sigma, default=-1)

    def put(self, n: int, poly: BiPoly, method: str) -> None:
        if method not in ("recurrence", "hankel"):
            raise ValueError(f"unknown method {method!r}")
        old = self.sigma.get(n)
        if old is not None and old != poly:
            raise ValueError(f"cache conflict at n={n}")
        self.sigma[n] = poly
        self.method.setdefault(n, method)

    def extend_entries(self, seq: Sequence[BiPoly]) -> None:
        for k, a in enumerate(seq):
            if k < len(self.entries):
                if self.entries[k] != a:
                    raise ValueError(f"cache conflict at entry {k}")
            else:
                self.entries.append(a)


def compute_entries(N: int, r_mode=SYMBOLIC) -> EntrySequence:
    if N < 0:
        raise ValueError("N must be nonnegative")
    r = r_poly(r_mode)
    c = T * Fraction(1, 8) - r
    tc = T * c
    a = [BiPoly.constant(1)]
    if N >= 1:
        a.append(T * Fraction(3, 4))
    for n in range(2, N + 1):
        prev = a[n - 1]
        conv = BiPoly()
        for k in range((n - 1) // 2):
            conv = conv + a[k] * a[n - 2 - k]
        conv = conv + conv
        if n % 2 == 0:
            conv = conv + a[(n - 2) // 2] * a[(n - 2) // 2]
        a.append(T * (prev.diff_t() + prev * Fraction(3, 4)) + tc * conv)
    return EntrySequence(tuple(a), parse_r_mode(r_mode))


def build_hankel(n: int, seq: EntrySequence | Sequence[BiPoly]) -> HankelMatrix:
    if n < 1:
        raise ValueError("n must be >= 1")
    entries = seq.entries if isinstance(seq, EntrySequence) else tuple(seq)
    if len(entries) < 2 * n - 1:
        raise InsufficientEntries(f"need a_0..a_{2 * n - 2}, have {len(entries)} entries")
    return HankelMatrix(n, tuple(entries[: 2 * n - 1]))


def _as_poly(x) -> BiPoly:
    return x if isinstance(x, BiPoly) else BiPoly.constant(x)


def bareiss_det(M) -> BiPoly:
    """Fraction-free determinant (Bareiss), pivoting rows on a zero pivot.

    Every division ``(m_kk m_ij - m_ik m_kj) / m_{k-1,k-1}`` is exact.  The
    pivots must be admissible divisors for exact_div (true for Hankel
    matrices of entries a_n, and for matrices over Q[t] or Q[r]).
    """
    rows = M.rows() if isinstance(M, HankelMatrix) else M
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ValueError("square matrix required")
    if n == 0:
        return BiPoly.constant(1)
    A = [[_as_poly(x) for x in row] for row in rows]
    sign = 1
    prev = BiPoly.constant(1)
    for k in range(n - 1):
        if not A[k][k]:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return BiPoly()
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        piv = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            for j in range(k + 1, n):
                num = piv * A[i][j]
                if aik and A[k][j]:
                    num = num - aik * A[k][j]
                A[i][j] = exact_div(num, prev)
            A[i][k] = BiPoly()
        prev = piv
    det = A[n - 1][n - 1]
    return -det if sign < 0 else det


def hankel_minors(n_max: int, seq: EntrySequence) -> list[BiPoly]:
    """Leading principal minors det(a_{i+j-2})_{i,j<=n} for n = 1..n_max.

    One Bareiss pass without pivoting: the k-th pivot is the k-th leading
    minor.  A zero pivot falls back to one determinant per n.
    """
    M = build_hankel(n_max, seq).rows()
    n = n_max
    A = [row[:] for row in M]
    minors = [A[0][0]]
    prev = BiPoly.constant(1)
    for k in range(n - 1):
        piv = A[k][k]
        if not piv:
            return [bareiss_det(build_hankel(m, seq)) for m in range(1, n_max + 1)]
        for i in range(k + 1, n):
            aik = A[i][k]
            for j in range(k + 1, n):
                num = piv * A[i][j]
                if aik and A[k][j]:
                    num = num - aik * A[k][j]
                A[i][j] = exact_div(num, prev)
        prev = piv
        minors.append(A[k + 1][k + 1])
    return minors


def cofactor_det(M) -> BiPoly:
    """Laplace expansion along the first row.  Exponential; test oracle only."""
    rows = [[_as_poly(x) for x in row] for row in M]
    n = len(rows)
    if n == 0:
        return BiPoly.constant(1)
    if n == 1:
        return rows[0][0]
    total = BiPoly()
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        term = rows[0][j] * cofactor_det(minor)
        total = total - term if j % 2 else total + term
    return total


def sigma_hankel(n: int, r_mode=SYMBOLIC, seq: EntrySequence | None = None) -> BiPoly:
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n <= 1:
        return BiPoly.constant(1)
    if seq is None:
        seq = compute_entries(2 * n - 2, r_mode)
    det = bareiss_det(build_hankel(n, seq))
    return exact_div(det, T ** (n * (n - 1) // 2))


def sigma_recurrence_table(n_max: int, r_mode=SYMBOLIC) -> list[BiPoly]:
    """[sigma_0, ..., sigma_{n_max}] by the bilinear recurrence.

    Each step divides by sigma_{n-1}; a nonzero remainder raises NotDivisible.
    """
    if n_max < 0:
        raise ValueError("n must be nonnegative")
    r = r_poly(r_mode)
    one = BiPoly.constant(1)
    sig = [one, one]
    base = T * Fraction(1, 8) - r
    for n in range(1, n_max):
        s = sig[n]
        ds = s.diff_t()
        lhs = (T * (s.diff_t().diff_t() * s - ds * ds) + ds * s
               + (base + Fraction(3 * n, 4)) * (s * s))
        sig.append(exact_div(lhs, sig[n - 1]))
    return sig[: n_max + 1]


def sigma_recurrence(n: int, r_mode=SYMBOLIC) -> BiPoly:
    return sigma_recurrence_table(n, r_mode)[n]


def rho(k: int, sigma_k: BiPoly) -> BiPoly:
    """rho_k = t**(k(k-1)/2) * sigma_k."""
    return sigma_k.mul_t_power(k * (k - 1) // 2)


def verify_scaled_toda(n: int, sigmas: Sequence[BiPoly] | None = None, r_mode=SYMBOLIC) -> bool:
    """Check t^2(p''p - p'^2) + t p' p + t(t/8 - r + 3n/4) p^2 == rho_{n+1} rho_{n-1}, p = rho_n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if sigmas is None:
        sigmas = sigma_recurrence_table(n + 1, r_mode)
    r = r_poly(r_mode)
    p = rho(n, sigmas[n])
    dp = p.diff_t()
    lhs = (T * T * (dp.diff_t() * p - dp * dp) + T * dp * p
           + T * (T * Fraction(1, 8) - r + Fraction(3 * n, 4)) * (p * p))
    rhs = rho(n + 1, sigmas[n + 1]) * rho(n - 1, sigmas[n - 1])
    return (lhs - rhs).is_zero()


@dataclass
class CrossCheckRow:
    n: int
    equal: bool
    deg_t: object
    deg_r: object
    seconds_hankel: float
    seconds_recurrence: float


@dataclass
class CrossCheckReport:
    r_mode: object
    rows: list[CrossCheckRow]

    @property
    def all_equal(self) -> bool:
        return all(row.equal for row in self.rows)

    @property
    def mismatches(self) -> list[int]:
        return [row.n for row in self.rows if not row.equal]


def cross_check(n_max: int, r_mode=SYMBOLIC, cache: UmemuraCache | None = None) -> CrossCheckReport:
    """Compare sigma_hankel(n) and sigma_recurrence(n) for 2 <= n <= n_max.

    Values already in ``cache`` stand in for the recurrence side, so a
    corrupted cache shows up as a mismatch.  Mismatches are recorded, never raised.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    t0 = time.perf_counter()
    rec = sigma_recurrence_table(n_max, r_mode)
    per_step = (time.perf_counter() - t0) / max(1, n_max - 1)
    t1 = time.perf_counter()
    seq = compute_entries(2 * n_max - 2, r_mode)
    minors = hankel_minors(n_max, seq)
    th = (time.perf_counter() - t1) / max(1, n_max - 1)
    rows = []
    for n in range(2, n_max + 1):
        h = exact_div(minors[n - 1], T ** (n * (n - 1) // 2))
        other = rec[n]
        if cache is not None and n in cache.sigma:
            other = cache.sigma[n]
        rows.append(CrossCheckRow(n, h == other, h.deg_t, h.deg_r, th, per_step))
    return CrossCheckReport(parse_r_mode(r_mode), rows)
