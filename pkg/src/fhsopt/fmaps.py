"""Symbol maps over GF(p^m) and difference-balanced functions.

Every map is materialised as a lookup table indexed by element code, so
evaluation over whole sequences is a single numpy gather.  Maps are
immutable once built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .errors import FieldError, HypothesisError, VerificationError
from .galois import (GF, FieldElement, Tower, _pgcd, fp_nullspace, fp_rank)

DBF_EXHAUSTIVE_CAP = 65536
DBF_SAMPLES = 10_000


def _code(field: GF, x) -> int:
    return x.code if isinstance(x, FieldElement) else field.code(x)


class _TableMap:
    """Shared plumbing: a map GF(q) -> GF(q) stored as a code table."""

    field: GF
    table: np.ndarray

    def __call__(self, x):
        if isinstance(x, FieldElement):
            if x.field != self.field:
                raise FieldError(f"element of {x.field} passed to a map on {self.field}")
            return FieldElement(self.field, int(self.table[x.code]))
        return int(self.table[x])

    def apply_vec(self, xs) -> np.ndarray:
        return self.table[np.asarray(xs, dtype=np.int64)]

    def is_bijective(self) -> bool:
        return len(np.unique(self.table)) == self.field.q


# ---------------------------------------------------------------------------
# linearized polynomials
# ---------------------------------------------------------------------------

class LinearizedMap(_TableMap):
    """phi_P(x) = sum_i c_i x^(p^i) for P(x) = sum_i c_i x^i over GF(p).

    Parameters
    ----------
    field : GF
    P : sequence of int
        Ascending coefficients of the monic polynomial P, read mod p.
    strict : bool
        Raise HypothesisError when phi_P is not a bijection of the field.
    """

    def __init__(self, field: GF, P: Sequence[int], strict: bool = True):
        coeffs = [int(c) % field.p for c in P]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs or coeffs[-1] != 1:
            raise FieldError(f"P must be monic, got {list(P)}")
        self.field = field
        self.P = tuple(coeffs)
        xs = np.arange(field.q, dtype=np.int64)
        acc = np.zeros(field.q, dtype=np.int64)
        y = xs
        for c in coeffs:
            if c:
                acc = field.add_vec(acc, field.scale_vec(c, y))
            y = field.pow_vec(y, field.p)
        self.table = acc
        if strict:
            ok, witness = self.bijectivity()
            if not ok:
                raise HypothesisError(
                    "linearized map must be a bijection (gcd(P, x^m - 1) = 1)",
                    f"phi_P({field.format(witness)}) = 0")

    @property
    def degree(self) -> int:
        return len(self.P) - 1

    def matrix(self) -> list[list[int]]:
        """Matrix over GF(p) in the polynomial basis; column j is phi(p^j)."""
        f = self.field
        cols = [f.coeffs(int(self.table[f.p ** j])) for j in range(f.m)]
        return [[cols[j][i] for j in range(f.m)] for i in range(f.m)]

    def kernel_basis(self) -> list[int]:
        f = self.field
        return [f.from_coeffs(v) for v in fp_nullspace(self.matrix(), f.m, f.p)]

    def bijectivity(self) -> tuple[bool, int | None]:
        """(True, None) for a bijection, else (False, nonzero kernel element)."""
        ker = self.kernel_basis()
        return (not ker, ker[0] if ker else None)

    def gcd_criterion(self) -> tuple[int, ...]:
        """gcd(P(x), x^m - 1) over GF(p), ascending and monic."""
        m, p = self.field.m, self.field.p
        xm1 = [p - 1] + [0] * (m - 1) + [1]
        return tuple(_pgcd(list(self.P), xm1, p))

    def to_spec(self) -> dict:
        if self.P == (1,) or (set(self.P[:-1]) == {0}):
            return {"kind": "frobenius", "j": self.degree}
        return {"kind": "linearized", "P": list(self.P)}

    def __repr__(self) -> str:
        return f"LinearizedMap(P={list(self.P)} on {self.field!r})"


def linearized_eval(phi: LinearizedMap, x):
    return phi(x)


def linearized_is_bijective(phi: LinearizedMap) -> tuple[bool, int | None]:
    return phi.bijectivity()


def frobenius_map(field: GF, j: int = 1) -> LinearizedMap:
    """x -> x^(p^j) as the linearized map of P(x) = x^j."""
    j %= field.m
    return LinearizedMap(field, [0] * j + [1])


class PowerMap(_TableMap):
    """x -> x^d with 0^0 = 1."""

    def __init__(self, field: GF, d: int, strict: bool = True):
        self.field = field
        self.d = int(d)
        self.table = field.pow_vec(np.arange(field.q), self.d)
        if strict and not self.is_permutation:
            raise HypothesisError(
                "power map exponent must satisfy gcd(d, q - 1) = 1",
                f"gcd({d}, {field.q - 1}) = {math.gcd(d, field.q - 1)}")

    @property
    def is_permutation(self) -> bool:
        return math.gcd(self.d, self.field.q - 1) == 1

    def to_spec(self) -> dict:
        return {"kind": "power", "d": self.d}

    def __repr__(self) -> str:
        return f"PowerMap(d={self.d} on {self.field!r})"


def power_map_eval(d: int, x: FieldElement) -> FieldElement:
    return x ** d


def is_permutation(d: int, field: GF) -> bool:
    return math.gcd(d, field.q - 1) == 1


# ---------------------------------------------------------------------------
# trace-vector maps
# ---------------------------------------------------------------------------

class TraceVectorMap:
    """x -> (Tr(a_0 x), ..., Tr(a_{k-1} x)) with traces down to GF(p).

    Output tuples are packed into one symbol code ``sum(c_i * p**i)`` by
    ``apply_vec`` and ``pack``; ``__call__`` returns the tuple itself.
    """

    def __init__(self, field: GF, w: Sequence):
        codes = [_code(field, a) for a in w]
        if not codes or not any(codes):
            raise HypothesisError("trace-vector map needs a nonzero vector w")
        self.field = field
        self.w = tuple(codes)
        self.k = len(codes)
        p, m = field.p, field.m
        self.rank = fp_rank([field.coeffs(a) for a in codes], p)
        # row i of the GF(p)-matrix of x -> Tr(a_i x) in the polynomial basis
        rows = [[field.trace(field.mul(a, p ** j)) for j in range(m)] for a in codes]
        self._rows = rows
        self.kernel_basis = [field.from_coeffs(v) for v in fp_nullspace(rows, m, p)]
        if len(self.kernel_basis) != m - self.rank:
            raise VerificationError(
                f"kernel dimension {len(self.kernel_basis)} differs from m - rank = {m - self.rank}")
        xs = np.arange(field.q, dtype=np.int64)
        place = p ** np.arange(self.k, dtype=np.int64)
        comps = np.stack([field.trace_vec(field.scale_vec(a, xs)) for a in codes], axis=1)
        self._components = comps
        self.table = comps @ place

    @property
    def kernel_dim(self) -> int:
        return len(self.kernel_basis)

    @property
    def alphabet_size(self) -> int:
        return self.field.p ** self.k

    def __call__(self, x) -> tuple[int, ...]:
        return tuple(int(c) for c in self._components[_code(self.field, x)])

    def pack(self, vec: Sequence[int]) -> int:
        return sum(int(c) * self.field.p ** i for i, c in enumerate(vec))

    def unpack(self, code: int) -> tuple[int, ...]:
        p = self.field.p
        return tuple((code // p ** i) % p for i in range(self.k))

    def apply_vec(self, xs) -> np.ndarray:
        return self.table[np.asarray(xs, dtype=np.int64)]

    def image(self) -> set[int]:
        return set(int(c) for c in np.unique(self.table))

    def kernel(self) -> set[int]:
        return set(int(c) for c in np.flatnonzero(self.table == 0))

    def to_spec(self) -> dict:
        return {"kind": "tmap", "w": list(self.w)}

    def __repr__(self) -> str:
        return f"TraceVectorMap(w={list(self.w)}, rank={self.rank} on {self.field!r})"


def tmap_create(field: GF, w: Sequence) -> TraceVectorMap:
    return TraceVectorMap(field, w)


def tmap_apply(tmap: TraceVectorMap, x) -> tuple[int, ...]:
    return tmap(x)


# ---------------------------------------------------------------------------
# map specs
# ---------------------------------------------------------------------------

def map_from_spec(field: GF, spec: dict, strict: bool = True):
    """Build a map from its tagged JSON form."""
    kind = spec.get("kind")
    if kind == "linearized":
        return LinearizedMap(field, spec["P"], strict=strict)
    if kind == "frobenius":
        return frobenius_map(field, int(spec.get("j", 1)))
    if kind == "identity":
        return frobenius_map(field, 0)
    if kind == "power":
        return PowerMap(field, int(spec["d"]), strict=strict)
    if kind == "tmap":
        return TraceVectorMap(field, spec["w"])
    raise FieldError(f"unknown map kind {kind!r}")


# ---------------------------------------------------------------------------
# balanced and difference-balanced functions
# ---------------------------------------------------------------------------

def _as_table(f, domain: GF) -> np.ndarray:
    if isinstance(f, DifferenceBalancedFunction):
        return f.table
    if isinstance(f, np.ndarray):
        return f.astype(np.int64)
    if callable(f):
        return np.array([int(f(x)) for x in range(domain.q)], dtype=np.int64)
    return np.asarray(f, dtype=np.int64)


def verify_balanced(f, domain: GF, codomain: GF) -> tuple[bool, list[int]]:
    """Check every codomain value has exactly |domain| / |codomain| preimages.

    Returns the verdict and the full histogram indexed by codomain code.
    """
    table = _as_table(f, domain)
    hist = np.bincount(table, minlength=codomain.q)
    return bool(np.all(hist == domain.q // codomain.q)), [int(h) for h in hist]


def _difference_hist(table_by_log: np.ndarray, f0: int, codomain: GF,
                     ks: np.ndarray) -> np.ndarray:
    """Histograms of f(delta x) - f(x) for delta = alpha^k, k in ks."""
    n = len(table_by_log)
    j = np.arange(n)
    shifted = table_by_log[(j[None, :] + ks[:, None]) % n]
    diff = codomain.sub_vec(shifted, np.broadcast_to(table_by_log, shifted.shape))
    rows = np.repeat(np.arange(len(ks)), n)
    flat = rows * codomain.q + diff.ravel()
    hist = np.bincount(flat, minlength=len(ks) * codomain.q).reshape(len(ks), codomain.q)
    hist[:, 0] += 1  # x = 0 gives f(0) - f(0) = 0
    return hist


def verify_difference_balanced(f, domain: GF, codomain: GF | None = None,
                               deltas: Sequence[int] | None = None
                               ) -> tuple[bool, int | None, list[int] | None]:
    """Check x -> f(delta x) - f(x) is balanced for all delta outside {0, 1}.

    Returns ``(ok, first failing delta code, its histogram)``; the last two
    are None on success.  ``deltas`` restricts the check to given codes.
    """
    if codomain is None:
        if not isinstance(f, DifferenceBalancedFunction):
            raise TypeError("codomain is required unless f is a DifferenceBalancedFunction")
        codomain = f.codomain
    table = _as_table(f, domain)
    by_log = table[domain.exp_table]
    ks = (np.arange(1, domain.q - 1) if deltas is None
          else np.array([domain.dlog(d) for d in deltas if d not in (0, 1)], dtype=np.int64))
    target = domain.q // codomain.q
    chunk = max(1, 2_000_000 // max(domain.q, 1))
    for start in range(0, len(ks), chunk):
        part = ks[start:start + chunk]
        hist = _difference_hist(by_log, int(table[0]), codomain, part)
        bad = np.flatnonzero(np.any(hist != target, axis=1))
        if len(bad):
            i = int(bad[0])
            return False, domain.alpha_pow(int(part[i])), [int(h) for h in hist[i]]
    return True, None, None


def find_d_form_degree(table: np.ndarray, tower: Tower, candidates: Sequence[int] | None = None
                       ) -> int | None:
    """Least d in [0, q-2] (or in ``candidates``) with f(yx) = y^d f(x) for y in GF(q)."""
    base, top = tower.base, tower.top
    ys = np.arange(1, base.q)
    ys_top = tower.embed_vec(ys)
    xs = np.arange(top.q)
    fyx = table[top.mul_vec(ys_top[:, None], xs[None, :])]
    cands = range(base.q - 1) if candidates is None else candidates
    for d in cands:
        yd = base.pow_vec(ys, d)
        if np.array_equal(fyx, base.mul_vec(yd[:, None], table[None, :])):
            return d
    return None


DBF_KINDS = ("linear_surjective", "trace_power", "lin_type", "composite", "helleseth_gong")


@dataclass
class DifferenceBalancedFunction:
    """A verified function GF(Q) -> GF(q) with f(0) = 0.

    ``table[x]`` is the base-field code of f(x) for every top-field code x.
    ``verified`` is False when the domain exceeded the exhaustive cap and
    only a random sample of deltas was checked.
    """

    tower: Tower
    spec: dict
    table: np.ndarray
    d_form_degree: int | None
    verified: bool
    checked_deltas: int = 0
    notes: list[str] = dc_field(default_factory=list)

    @property
    def domain(self) -> GF:
        return self.tower.top

    @property
    def codomain(self) -> GF:
        return self.tower.base

    def __call__(self, x):
        if isinstance(x, FieldElement):
            return FieldElement(self.codomain, int(self.table[x.code]))
        return int(self.table[x])

    def apply_vec(self, xs) -> np.ndarray:
        return self.table[np.asarray(xs, dtype=np.int64)]

    def as_top(self) -> np.ndarray:
        """Values embedded back into the domain field, as top codes."""
        return self.tower.embed_vec(self.table)

    def to_spec(self) -> dict:
        return dict(self.spec)


def _raw_table(spec: dict, tower: Tower, check_params: bool) -> tuple[np.ndarray, int | None]:
    """Evaluate the function described by ``spec``; returns (table, declared d)."""
    top, base = tower.top, tower.base
    kind = spec.get("kind")
    xs = np.arange(top.q, dtype=np.int64)
    Q = top.q
    if kind == "trace_power":
        d = int(spec["d"])
        if check_params and math.gcd(d, Q - 1) != 1:
            raise HypothesisError("trace_power needs gcd(d, q^n - 1) = 1",
                                  f"gcd({d}, {Q - 1}) = {math.gcd(d, Q - 1)}")
        return tower.trace_vec(top.pow_vec(xs, d)), d
    if kind == "linear_surjective":
        c = _code(top, spec.get("c", 1))
        if check_params and c == 0:
            raise HypothesisError("linear_surjective needs a nonzero multiplier c")
        return tower.trace_vec(top.scale_vec(c, xs)), 1
    if kind == "lin_type":
        if top.p != 3 or base.m != 1:
            raise HypothesisError("lin_type needs domain GF(3^m) and codomain GF(3)")
        if check_params and top.m % 2 == 0:
            raise HypothesisError("lin_type needs odd m = 2l + 1", f"m = {top.m}")
        l = int(spec.get("l", (top.m - 1) // 2))
        if check_params and 2 * l + 1 != top.m:
            raise HypothesisError("lin_type needs m = 2l + 1", f"l = {l}, m = {top.m}")
        s = 2 * 3 ** l + 1
        return tower.trace_vec(top.add_vec(xs, top.pow_vec(xs, s))), 1
    if kind == "composite":
        # optional domain map, inner function, optional codomain map
        inner_spec = spec["inner"]
        pre = spec.get("pre")
        post = spec.get("post")
        table, _ = _raw_table(inner_spec, tower, check_params)
        if pre is not None:
            pmap = map_from_spec(top, pre, strict=check_params)
            table = table[pmap.table]
        if post is not None:
            qmap = map_from_spec(base, post, strict=check_params)
            table = qmap.table[table]
        return table, None
    if kind == "helleseth_gong":
        raise HypothesisError("helleseth_gong functions are not supported",
                              "no explicit formula is available to build them")
    raise HypothesisError(f"unknown DBF kind {kind!r}")


def dbf_create(spec: dict, tower: Tower, *, cap: int = DBF_EXHAUSTIVE_CAP,
               samples: int = DBF_SAMPLES, seed: int = 0,
               check_params: bool = True) -> DifferenceBalancedFunction:
    """Build and verify a difference-balanced function GF(Q) -> GF(q).

    Family preconditions raise HypothesisError.  Up to ``cap`` domain
    elements, balance and difference balance are checked for every delta;
    above it ``samples`` random deltas are checked and ``verified`` is
    False.  Any failure raises VerificationError carrying ``delta``.
    """
    table, declared = _raw_table(spec, tower, check_params)
    top, base = tower.top, tower.base
    notes = []
    if table[0] != 0:
        raise VerificationError("f(0) must be 0")
    exhaustive = top.q <= cap
    if exhaustive:
        deltas = None
        checked = top.q - 2
    else:
        rng = np.random.default_rng(seed)
        deltas = [int(x) for x in rng.integers(2, top.q, size=samples)]
        checked = len(deltas)
        notes.append(f"domain of {top.q} elements exceeds cap {cap}; {checked} sampled deltas")
    ok, delta, hist = verify_difference_balanced(table, top, base, deltas)
    if not ok:
        err = VerificationError(
            f"not difference-balanced: delta = {top.format(delta)} gives histogram {hist}")
        err.delta = delta
        err.histogram = hist
        raise err
    ok, hist = verify_balanced(table, top, base)
    if not ok:
        err = VerificationError(f"function is not balanced: histogram {hist}")
        err.delta = None
        err.histogram = hist
        raise err
    if declared is not None:
        d = declared % (base.q - 1) if base.q > 2 else declared
        if find_d_form_degree(table, tower, [d]) is None:
            raise VerificationError(f"declared d-form degree {declared} does not hold")
        degree = declared
    else:
        degree = find_d_form_degree(table, tower)
    return DifferenceBalancedFunction(tower, dict(spec), table, degree, exhaustive, checked, notes)


def dbf_zero_line(f: DifferenceBalancedFunction, delta) -> int:
    """Return a_delta with zero set of f(delta x) - f(x) equal to GF(q) a_delta.

    Requires a degree-2 tower.  The smallest nonzero code in the zero set is
    returned after checking the whole set is that one line.
    """
    tower = f.tower
    top, base = tower.top, tower.base
    if tower.n != 2:
        raise HypothesisError("zero-line property needs a quadratic extension", f"n = {tower.n}")
    dc = _code(top, delta)
    if dc in (0, 1):
        raise HypothesisError("delta must lie outside {0, 1}")
    xs = np.arange(top.q)
    vals = base.sub_vec(f.table[top.mul_vec(np.full(top.q, dc), xs)], f.table)
    zeros = set(int(z) for z in np.flatnonzero(vals == 0))
    nz = sorted(zeros - {0})
    if not nz:
        raise VerificationError("zero set of f_delta is {0}")
    a = nz[0]
    line = {top.mul(tower.embed(c), a) for c in range(base.q)}
    if zeros != line:
        raise VerificationError(
            f"zero set of f_delta has {len(zeros)} elements and is not the line through {top.format(a)}")
    return a
