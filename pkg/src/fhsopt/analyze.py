"""Partial Hamming correlation, correlation and size bounds, certification.

For a pair of sequences X, Y of period N the partial Hamming correlation
H(tau; j | L) counts t in [j, j+L-1] with x_t = y_{t+tau}, indices mod N.
M(F; L) is its maximum over all windows, over shifts 1..N-1 of each
sequence against itself, and over shifts 0..N-1 of distinct pairs.

Two engines compute M(F; L):

* ``prefix``: per (pair, tau) hit rows and cyclic prefix sums, O(N^2) per
  pair and window length;
* ``span``: for each (pair, tau) the shortest cyclic span containing k
  hits, which yields every L at once in O(hits^2).

All arithmetic on bounds is exact integer arithmetic.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np

from .construct import FhsSet
from .errors import BudgetError, VerificationError

DEFAULT_BUDGET = 10 ** 10


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get("FHS_THREAD_BUDGET", "1") or 1)
    return max(1, int(threads))


# ---------------------------------------------------------------------------
# correlation
# ---------------------------------------------------------------------------

def partial_hamming(fhs: FhsSet, i: int, j: int, tau: int, j_start: int, L: int) -> int:
    """#{t in [j_start, j_start + L - 1] : x_t = y_{t + tau}} for X = S^i, Y = S^j."""
    N, M = fhs.N, fhs.M
    if not (0 <= i < M and 0 <= j < M):
        raise ValueError(f"sequence index out of range for M = {M}")
    if not 1 <= L <= N:
        raise ValueError(f"window length {L} outside [1, {N}]")
    if not (0 <= tau < N and 0 <= j_start < N):
        raise ValueError(f"shift and window start must lie in [0, {N - 1}]")
    t = (j_start + np.arange(L)) % N
    mat = fhs.matrix
    return int(np.count_nonzero(mat[i, t] == mat[j, (t + tau) % N]))


def pairs(M: int) -> list[tuple[int, int]]:
    """Unordered pairs i <= j; H(S^j, S^i) mirrors H(S^i, S^j) so these suffice."""
    return [(i, j) for i in range(M) for j in range(i, M)]


def hit_rows(fhs: FhsSet, i: int, j: int) -> np.ndarray:
    """Boolean array (shift, t) of x_t == y_{t+shift}; shift 0 dropped when i == j."""
    N = fhs.N
    X, Y = fhs.matrix[i], fhs.matrix[j]
    taus = np.arange(1 if i == j else 0, N)
    idx = (np.arange(N)[None, :] + taus[:, None]) % N
    return X[None, :] == Y[idx]


def _pair_prefix(fhs: FhsSet, pair: tuple[int, int], Ls: Sequence[int]) -> np.ndarray:
    hits = hit_rows(fhs, *pair)
    N = fhs.N
    out = np.zeros(len(Ls), dtype=np.int64)
    if hits.shape[0] == 0:
        return out
    cums = np.zeros((hits.shape[0], 2 * N + 1), dtype=np.int32)
    np.cumsum(np.concatenate([hits, hits], axis=1), axis=1, out=cums[:, 1:])
    for k, L in enumerate(Ls):
        out[k] = int((cums[:, L:L + N] - cums[:, :N]).max())
    return out


def _pair_spans(fhs: FhsSet, pair: tuple[int, int]) -> np.ndarray:
    """best[k] = shortest cyclic window holding k hits for this pair (k = 0..N)."""
    N = fhs.N
    best = np.full(N + 1, N + 1, dtype=np.int64)
    best[0] = 0
    hits = hit_rows(fhs, *pair)
    for row in hits:
        pos = np.flatnonzero(row)
        h = len(pos)
        if h == 0:
            continue
        ext = np.concatenate([pos, pos + N])
        s = np.arange(h)
        k = np.arange(h)
        spans = (ext[s[None, :] + k[:, None]] - ext[s][None, :] + 1).min(axis=1)
        np.minimum(best[1:h + 1], spans, out=best[1:h + 1])
    return best


def _map_pairs(fn, fhs: FhsSet, threads: int | None, *args) -> list:
    work = pairs(fhs.M)
    n = resolve_threads(threads)
    if n == 1 or len(work) == 1:
        return [fn(fhs, pr, *args) for pr in work]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda pr: fn(fhs, pr, *args), work))


def full_profile_cost(fhs: FhsSet) -> int:
    return fhs.M ** 2 * fhs.N ** 3


def spot_list(fhs: FhsSet) -> list[int]:
    """{1, n', n'+1, 2n', N} clipped to [1, N].

    n' is the period P of the claimed profile ceil(L / P), read from the
    provenance lattice period, falling back to ``n_prime``.
    """
    N = fhs.N
    n2 = fhs.provenance.get("lattice_period") or fhs.provenance.get("n_prime")
    cand = {1, N} if not n2 else {1, n2, n2 + 1, 2 * n2, N}
    return sorted(L for L in cand if 1 <= L <= N)


def correlation_profile(fhs: FhsSet, L_list: Iterable[int] | None = None, *,
                        budget: int = DEFAULT_BUDGET, threads: int | None = None,
                        engine: str = "prefix") -> dict[int, int]:
    """M(F; L) for the requested window lengths.

    Without ``L_list`` every L in 1..N is evaluated when M^2 N^3 fits the
    budget (or with ``engine="span"``); otherwise the spot list derived from
    provenance is used, and a set without provenance raises BudgetError.
    """
    N = fhs.N
    if L_list is None:
        if engine == "span" or full_profile_cost(fhs) <= budget:
            Ls = list(range(1, N + 1))
        elif fhs.provenance.get("lattice_period") or fhs.provenance.get("n_prime"):
            Ls = spot_list(fhs)
        else:
            raise BudgetError(f"full profile needs {full_profile_cost(fhs)} steps, budget {budget}")
    else:
        Ls = sorted(set(int(L) for L in L_list))
    if any(not 1 <= L <= N for L in Ls):
        raise ValueError(f"window lengths must lie in [1, {N}]")
    if engine == "span":
        prof = span_profile(fhs, threads=threads)
        return {L: prof[L - 1] for L in Ls}
    if engine != "prefix":
        raise ValueError(f"unknown engine {engine!r}")
    parts = _map_pairs(_pair_prefix, fhs, threads, Ls)
    best = np.max(np.stack(parts), axis=0)
    return {L: int(v) for L, v in zip(Ls, best)}


def span_profile(fhs: FhsSet, *, threads: int | None = None) -> list[int]:
    """Exact [M(F; 1), ..., M(F; N)] from minimal hit spans."""
    N = fhs.N
    best = np.min(np.stack(_map_pairs(_pair_spans, fhs, threads)), axis=0)
    Ls = np.arange(1, N + 1)
    # best is nondecreasing in k, so M(F; L) = #{k >= 1 : best[k] <= L}
    return [int(v) for v in np.searchsorted(best[1:], Ls, side="right")]


def set_max_correlation(fhs: FhsSet, L: int) -> int:
    return correlation_profile(fhs, [L])[L]


def check_profile_shape(profile: dict[int, int]) -> None:
    """Raise VerificationError unless M(L) is nondecreasing with unit steps."""
    Ls = sorted(profile)
    for a, b in zip(Ls, Ls[1:]):
        if profile[b] < profile[a] or profile[b] > profile[a] + (b - a):
            raise VerificationError(f"profile is not monotone with unit steps at L = {a}, {b}")


# ---------------------------------------------------------------------------
# hit lattice
# ---------------------------------------------------------------------------

@dataclass
class LatticeResult:
    ok: bool
    period: int
    witness: tuple | None = None

    @property
    def bound(self):
        """The implied upper bound L -> ceil(L / period)."""
        return lambda L: ceil_div(L, self.period)


def verify_hit_lattice(fhs: FhsSet, period: int | None = None) -> LatticeResult:
    """Check that for every (pair, shift) the hit positions share one residue mod period.

    Together with N divisible by the period this gives
    M(F; L) <= ceil(L / period) for every L.  The witness on failure is
    (i, j, tau, t0, t1) with two hits in different residue classes.
    """
    P = period or fhs.provenance.get("lattice_period")
    if not P:
        raise ValueError("no lattice period given or recorded in provenance")
    N = fhs.N
    if N % P:
        return LatticeResult(False, P, ("period does not divide N", N, P))
    res = np.arange(N) % P
    for i, j in pairs(fhs.M):
        hits = hit_rows(fhs, i, j)
        lo = np.where(hits, res[None, :], P).min(axis=1)
        hi = np.where(hits, res[None, :], -1).max(axis=1)
        bad = np.flatnonzero((hi >= 0) & (lo != hi))
        if len(bad):
            row = int(bad[0])
            tau = row + (1 if i == j else 0)
            pos = np.flatnonzero(hits[row])
            t1 = int(pos[np.flatnonzero(res[pos] != res[pos[0]])[0]])
            return LatticeResult(False, P, (i, j, tau, int(pos[0]), t1))
    return LatticeResult(True, P)


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def niu_inner(N: int, M: int, d_prime: int) -> int:
    """ceil((N M - d') N / ((M N - 1) d'))."""
    return ceil_div((N * M - d_prime) * N, (M * N - 1) * d_prime)


def niu_bounds(N: int, M: int, d_prime: int, L: int) -> tuple[int, int]:
    """Lower bounds on M(F; L) for any (N, M; d') set.

    Returns ``(ceil(L inner / N), ceil((2 I M N - (I+1) I d') L / ((M N - 1) M N)))``
    with ``I = floor(M N / d')``.  Both are 0 for the degenerate M N = 1.
    """
    if min(N, M, d_prime, L) < 1:
        raise ValueError("N, M, d' and L must be positive")
    if M * N == 1:
        return 0, 0
    b6 = ceil_div(L * niu_inner(N, M, d_prime), N)
    I = M * N // d_prime
    b7 = ceil_div((2 * I * M * N - (I + 1) * I * d_prime) * L, (M * N - 1) * M * N)
    return b6, b7


def size_bound_ratio_term(N: int, d_prime: int, L: int, ML: int) -> int | None:
    """floor(floor((L - M_L) d' / (L - d' M_L)) / N), None unless L > d' M_L."""
    if L <= d_prime * ML:
        return None
    return ((L - ML) * d_prime // (L - d_prime * ML)) // N


def size_bound_power_term(N: int, d_prime: int, L: int, ML: int) -> int | None:
    """floor(d'^(M_L + 1) / N), None unless L > M_L."""
    if L <= ML:
        return None
    return d_prime ** (ML + 1) // N


@dataclass
class SizeBounds:
    ratio: int | None
    ratio_witness: int | None
    power: int | None
    power_witness: int | None


def cai_size_bounds(N: int, d_prime: int, profile: dict[int, int]) -> SizeBounds:
    """Minimise both family-size ceilings over the admissible L in ``profile``.

    Only 2 <= L <= N are scanned.  A ceiling with no admissible L is None
    (vacuous); the witness is the least L attaining the minimum.
    """
    best = {"ratio": (None, None), "power": (None, None)}
    for L in sorted(profile):
        if not 2 <= L <= N:
            continue
        for key, fn in (("ratio", size_bound_ratio_term), ("power", size_bound_power_term)):
            val = fn(N, d_prime, L, profile[L])
            if val is not None and (best[key][0] is None or val < best[key][0]):
                best[key] = (val, L)
    return SizeBounds(best["ratio"][0], best["ratio"][1], best["power"][0], best["power"][1])


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------

@dataclass
class OptimalityReport:
    N: int
    M: int
    d_prime: int
    mode: str
    rows: list[dict]
    size: SizeBounds
    strict_corr_optimal: bool
    size_optimal: bool
    lattice: dict | None = None
    lower_bound_violations: list[int] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.strict_corr_optimal and self.size_optimal

    @property
    def evaluated_L(self) -> list[int]:
        return [r["L"] for r in self.rows]

    @property
    def profile(self) -> dict[int, int]:
        return {r["L"]: r["M"] for r in self.rows}

    def failing_L(self) -> list[int]:
        return [r["L"] for r in self.rows if r["met_by"] in ("exceeds", "below")]

    def to_json(self) -> dict:
        return {
            "N": self.N, "M": self.M, "d_prime": self.d_prime, "mode": self.mode,
            "evaluated_L": self.evaluated_L,
            "rows": self.rows,
            "lattice": self.lattice,
            "summary": {
                "strict_corr_optimal": self.strict_corr_optimal,
                "size_optimal": self.size_optimal,
                "size_bound8": self.size.ratio,
                "size_bound9": self.size.power,
                "witnesses": {"size_bound8": self.size.ratio_witness,
                              "size_bound9": self.size.power_witness},
                "lower_bound_violations": self.lower_bound_violations,
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, ["L", "M", "bound6", "bound7", "met_by"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()


def _verdict(value: int, b6: int, b7: int) -> str:
    if value < max(b6, b7):
        return "below"
    if value == b6 and value == b7:
        return "both"
    if value == b6:
        return "bound6"
    if value == b7:
        return "bound7"
    return "exceeds"


def certify(fhs: FhsSet, mode: str = "full", *, budget: int = DEFAULT_BUDGET,
            threads: int | None = None) -> OptimalityReport:
    """Compare the correlation profile and family size with the bounds.

    ``full`` evaluates every L (prefix engine within budget, span engine
    beyond it).  ``spot`` evaluates the spot list and extends the verdict
    to all L through the hit lattice: the lattice caps M(F; L) at
    ceil(L / P), and where the larger lower bound equals that cap the
    value is pinned for every L.
    """
    N, M, dp = fhs.N, fhs.M, fhs.d_prime
    lattice = None
    if mode == "full":
        if full_profile_cost(fhs) <= budget:
            profile = correlation_profile(fhs, threads=threads, budget=budget)
        else:
            prof = span_profile(fhs, threads=threads)
            profile = {L: prof[L - 1] for L in range(1, N + 1)}
        size_profile = profile
    elif mode == "spot":
        profile = correlation_profile(fhs, spot_list(fhs), threads=threads)
        size_profile = dict(profile)
        if fhs.provenance.get("lattice_period"):
            lat = verify_hit_lattice(fhs)
            pinned = lat.ok and all(
                max(niu_bounds(N, M, dp, L)) == ceil_div(L, lat.period) for L in range(1, N + 1))
            lattice = {"period": lat.period, "ok": lat.ok,
                       "witness": list(lat.witness) if lat.witness else None,
                       "certified_all_L": pinned}
            if pinned:
                size_profile = {L: ceil_div(L, lat.period) for L in range(1, N + 1)}
                agree = all(profile[L] == size_profile[L] for L in profile)
                lattice["spot_agrees"] = agree
                lattice["certified_all_L"] = agree
    else:
        raise ValueError(f"unknown mode {mode!r}")
    check_profile_shape(profile)
    rows, below = [], []
    for L in sorted(profile):
        b6, b7 = niu_bounds(N, M, dp, L)
        verdict = _verdict(profile[L], b6, b7)
        if verdict == "below":
            below.append(L)
        rows.append({"L": L, "M": profile[L], "bound6": b6, "bound7": b7, "met_by": verdict})
    corr_ok = all(r["met_by"] in ("bound6", "bound7", "both") for r in rows)
    if mode == "spot":
        corr_ok = corr_ok and bool(lattice and lattice["certified_all_L"])
    size = cai_size_bounds(N, dp, size_profile)
    size_ok = M in {b for b in (size.ratio, size.power) if b is not None}
    return OptimalityReport(N, M, dp, mode, rows, size, corr_ok, size_ok, lattice, below)
