"""Frequency-hopping sequence sets built from finite-field maps.

Three families are provided on top of a generic composition
``s^i_t = phi(u^i_{t mod n}) + psi(v_{t mod n'})``:

* class 1: additive cosets of a subfield composed with a power map,
  an (p^k (p^m - 1), p^(m-k); p^m) set;
* class 2: a trace-vector map applied to decimated powers of alpha,
  a ((q-1)/r, r; p^(m-1)) set;
* class 3: a trace-vector map applied to a difference-balanced function
  on GF(q^2), a ((q^2-1)/r, r; q) set.

Every set carries a provenance record from which ``from_provenance``
rebuilds it bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import FhsError, HypothesisError
from .fmaps import (DifferenceBalancedFunction, LinearizedMap, PowerMap, TraceVectorMap,
                    dbf_create, frobenius_map, map_from_spec)
from .galois import GF, Tower, coset_representatives


class FhsFormatError(FhsError, ValueError):
    """A serialized FHS set is malformed."""


@dataclass(frozen=True)
class FhsSet:
    """M sequences of period N over an alphabet of d' symbol codes.

    ``sequences`` hold indices into ``alphabet``; the alphabet is sorted by
    code and every symbol occurs somewhere in the set.
    """

    alphabet: tuple[int, ...]
    sequences: tuple[tuple[int, ...], ...]
    provenance: dict = dc_field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.sequences:
            raise FhsFormatError("an FHS set needs at least one sequence")
        n = len(self.sequences[0])
        if n == 0 or any(len(s) != n for s in self.sequences):
            raise FhsFormatError("sequences must be nonempty and of equal length")
        used = set()
        for s in self.sequences:
            used.update(s)
        if min(used) < 0 or max(used) >= len(self.alphabet):
            raise FhsFormatError("sequence entry outside the alphabet")
        if len(used) != len(self.alphabet):
            raise FhsFormatError("every alphabet symbol must occur in some sequence")
        if list(self.alphabet) != sorted(set(self.alphabet)):
            raise FhsFormatError("alphabet must be strictly ascending")

    @classmethod
    def from_symbols(cls, rows: Sequence[Sequence[int]], provenance: dict | None = None) -> "FhsSet":
        mat = np.asarray(rows, dtype=np.int64)
        alphabet, inverse = np.unique(mat, return_inverse=True)
        idx = inverse.reshape(mat.shape)
        return cls(tuple(int(a) for a in alphabet),
                   tuple(tuple(int(x) for x in row) for row in idx),
                   dict(provenance or {}))

    @property
    def N(self) -> int:
        return len(self.sequences[0])

    @property
    def M(self) -> int:
        return len(self.sequences)

    @property
    def d_prime(self) -> int:
        return len(self.alphabet)

    @cached_property
    def matrix(self) -> np.ndarray:
        """M x N array of alphabet indices."""
        mat = np.array(self.sequences, dtype=np.int64)
        mat.setflags(write=False)
        return mat

    def symbols(self, i: int) -> list[int]:
        return [self.alphabet[x] for x in self.sequences[i]]

    def symbol_matrix(self) -> np.ndarray:
        return np.asarray(self.alphabet, dtype=np.int64)[self.matrix]

    def with_symbol(self, i: int, t: int, symbol: int) -> "FhsSet":
        """Copy with entry (i, t) replaced; used for negative controls."""
        rows = self.symbol_matrix().copy()
        rows[i, t] = symbol
        prov = dict(self.provenance)
        prov["modified"] = {"i": i, "t": t, "symbol": int(symbol)}
        return FhsSet.from_symbols(rows, prov)

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {"N": self.N, "M": self.M, "alphabet": list(self.alphabet),
                "sequences": [list(s) for s in self.sequences],
                "provenance": self.provenance}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "FhsSet":
        try:
            fhs = cls(tuple(int(a) for a in data["alphabet"]),
                      tuple(tuple(int(x) for x in s) for s in data["sequences"]),
                      dict(data.get("provenance", {})))
        except (KeyError, TypeError) as exc:
            raise FhsFormatError(f"malformed FHS set: {exc}") from exc
        if "N" in data and int(data["N"]) != fhs.N or "M" in data and int(data["M"]) != fhs.M:
            raise FhsFormatError("declared N or M disagrees with the sequences")
        return fhs

    @classmethod
    def loads(cls, text: str) -> "FhsSet":
        try:
            return cls.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise FhsFormatError(f"invalid JSON: {exc}") from exc

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.symbol_matrix():
            writer.writerow(int(x) for x in row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, provenance: dict | None = None) -> "FhsSet":
        try:
            rows = [[int(x) for x in r] for r in csv.reader(io.StringIO(text)) if r]
        except ValueError as exc:
            raise FhsFormatError(f"non-integer symbol in CSV: {exc}") from exc
        if not rows or len({len(r) for r in rows}) != 1:
            raise FhsFormatError("CSV rows must be nonempty and of equal length")
        return cls.from_symbols(rows, provenance)


# ---------------------------------------------------------------------------
# hypotheses of the generic composition
# ---------------------------------------------------------------------------

def check_property_Au(U: Sequence[Sequence[int]], phi) -> tuple[bool, tuple | None]:
    """phi(u^i_{t+tau}) - phi(u^j_t) is a nonzero constant in t.

    Checked for every (i, j, tau) except (i, i, 0).  On failure the witness
    is (i, j, tau, t) with t the first position that breaks constancy, or 0
    when the constant is zero.
    """
    field = phi.field
    img = phi.table[np.asarray(U, dtype=np.int64)]
    M, n = img.shape
    t = np.arange(n)
    for i in range(M):
        for j in range(M):
            for tau in range(n):
                if i == j and tau == 0:
                    continue
                diff = field.sub_vec(img[i, (t + tau) % n], img[j])
                bad = np.flatnonzero(diff != diff[0])
                if len(bad):
                    return False, (i, j, tau, int(bad[0]))
                if diff[0] == 0:
                    return False, (i, j, tau, 0)
    return True, None


def check_property_Av(v: Sequence[int], psi) -> tuple[bool, tuple | None]:
    """Each difference psi(v_{t+tau}) - psi(v_t) occurs at most once per shift.

    On failure the witness is (b, tau, t1, t2) with two colliding positions.
    """
    field = psi.field
    img = psi.table[np.asarray(v, dtype=np.int64)]
    n = len(img)
    t = np.arange(n)
    for tau in range(1, n):
        diff = field.sub_vec(img[(t + tau) % n], img)
        order = np.argsort(diff, kind="stable")
        dup = np.flatnonzero(diff[order][1:] == diff[order][:-1])
        if len(dup):
            k = int(dup[0])
            t1, t2 = sorted((int(order[k]), int(order[k + 1])))
            return False, (int(diff[t1]), tau, t1, t2)
    return True, None


def compose_generic(U: Sequence[Sequence[int]], phi, v: Sequence[int], psi,
                    *, enforce: bool = True, provenance: dict | None = None) -> FhsSet:
    """s^i_t = phi(u^i_{t mod n}) + psi(v_{t mod n'}) for t < n n'.

    ``enforce`` checks gcd(n, n') = 1 and both properties; pass False to
    compose non-conforming inputs on purpose.
    """
    field = phi.field
    if psi.field != field:
        raise HypothesisError("phi and psi must act on the same field")
    Ua = np.asarray(U, dtype=np.int64)
    va = np.asarray(v, dtype=np.int64)
    n, n2 = Ua.shape[1], len(va)
    if enforce:
        if math.gcd(n, n2) != 1:
            raise HypothesisError("inner and outer lengths must be coprime",
                                  f"gcd({n}, {n2}) = {math.gcd(n, n2)}")
        ok, wit = check_property_Au(Ua, phi)
        if not ok:
            raise HypothesisError("inner set must satisfy property A_u",
                                  f"(i, j, tau, t) = {wit}")
        ok, wit = check_property_Av(va, psi)
        if not ok:
            raise HypothesisError("outer vector must satisfy property A_v",
                                  f"(b, tau, t1, t2) = {wit}")
    N = n * n2
    t = np.arange(N)
    rows = field.add_vec(phi.table[Ua[:, t % n]], psi.table[va[t % n2]][None, :])
    prov = {"construction": "generic", "field": field.to_json(), "n": n, "n_prime": n2,
            "lattice_period": n2, "enforced": enforce}
    if provenance:
        prov.update(provenance)
    return FhsSet.from_symbols(rows, prov)


# ---------------------------------------------------------------------------
# class 1
# ---------------------------------------------------------------------------

def default_sigma(field: GF, k: int) -> list[int]:
    """sigma(a) = sum of base-p digits of a times gamma^i, gamma generating GF(p^k)."""
    p = field.p
    gamma = field.alpha_pow((field.q - 1) // (p ** k - 1))
    basis = [field.pow(gamma, i) for i in range(k)]
    out = []
    for a in range(p ** k):
        acc = 0
        for i in range(k):
            c = (a // p ** i) % p
            if c:
                acc = field.add(acc, field.mul(c, basis[i]))
        out.append(acc)
    return out


def inner_set(field: GF, k: int, sigma: Sequence[int], reps: Sequence[int]) -> list[list[int]]:
    """u^i_t = a_i + sigma(t) for t < p^k."""
    return [[field.add(a, s) for s in sigma] for a in reps]


def _check_sigma(field: GF, k: int, sigma: Sequence[int]) -> None:
    sub = set(field.subfield_elements(k))
    if len(sigma) != field.p ** k or set(sigma) != sub:
        raise HypothesisError("sigma must be a bijection onto the subfield GF(p^k)")
    if sigma[0] != 0:
        raise HypothesisError("sigma must satisfy sigma(0) = 0")


def construct_class1(field: GF, k: int, P: Sequence[int] = (1,), d: int = 1,
                     sigma: Sequence | None = None, reps: Sequence | None = None,
                     *, enforce: bool = True) -> FhsSet:
    """Cosets of GF(p^k) composed with x -> x^d over v = (alpha^t).

    Parameters
    ----------
    field : GF
        GF(p^m); ``field.alpha`` supplies v.
    k : int
        Proper divisor of m.
    P : sequence of int
        Coefficients of P for the linearized inner map.
    d : int
        Exponent of the outer power map, gcd(d, p^m - 1) = 1.
    sigma, reps : optional
        Overrides for the index-to-subfield bijection and the coset
        representatives (codes or element strings).
    """
    p, m = field.p, field.m
    if k < 1 or m % k or k >= m:
        raise HypothesisError("k must be a proper divisor of m", f"k = {k}, m = {m}")
    if math.gcd(d, field.q - 1) != 1:
        raise HypothesisError("gcd(d, q - 1) = 1", f"gcd({d}, {field.q - 1}) = {math.gcd(d, field.q - 1)}")
    phi = LinearizedMap(field, P)
    psi = PowerMap(field, d)
    sig = default_sigma(field, k) if sigma is None else [field.code(s) for s in sigma]
    _check_sigma(field, k, sig)
    try:
        reps_c = coset_representatives(field, k, reps)
    except FhsError as exc:
        raise HypothesisError("coset representatives must lie in distinct cosets", str(exc)) from exc
    U = inner_set(field, k, sig, reps_c)
    v = [field.alpha_pow(t) for t in range(field.q - 1)]
    prov = {"construction": "class1", "field": field.to_json(), "k": k, "P": list(phi.P),
            "d": d, "sigma": sig, "reps": reps_c, "n": p ** k, "n_prime": field.q - 1,
            "lattice_period": field.q - 1, "alphabet_kind": "field"}
    return compose_generic(U, phi, v, psi, enforce=enforce, provenance=prov)


# ---------------------------------------------------------------------------
# class 2
# ---------------------------------------------------------------------------

def construct_class2(field: GF, w: Sequence, r: int = 1, d: int = 1, psi=None,
                     *, alpha: int | None = None, unsafe: bool = False) -> FhsSet:
    """s^i_t = T_w(psi(alpha^(d(i + r t)))) for i < r, t < (q-1)/r.

    ``psi`` is an F_p-linear automorphism (a LinearizedMap, default the
    identity).  ``alpha`` overrides the generator; with ``unsafe`` it may be
    non-primitive, which voids the correlation guarantee.
    """
    p, m, q = field.p, field.m, field.q
    tmap = TraceVectorMap(field, w)
    psi = frobenius_map(field, 0) if psi is None else psi
    if not isinstance(psi, LinearizedMap) or psi.field != field:
        raise HypothesisError("psi must be an F_p-linear automorphism of the field")
    if not psi.is_bijective():
        raise HypothesisError("psi must be bijective")
    if tmap.rank != m - 1:
        raise HypothesisError("R(w) = m - 1", f"rank {tmap.rank}, m = {m}")
    if r < 1 or (p - 1) % r:
        raise HypothesisError("r | p - 1", f"r = {r}, p = {p}")
    if math.gcd(r, m) != 1:
        raise HypothesisError("gcd(r, m) = 1", f"gcd({r}, {m}) = {math.gcd(r, m)}")
    if math.gcd(d, q - 1) != 1:
        raise HypothesisError("gcd(d, q - 1) = 1", f"gcd({d}, {q - 1}) = {math.gcd(d, q - 1)}")
    g = field.alpha.code if alpha is None else field.code(alpha)
    if g == 0 or (field.order(g) != q - 1 and not unsafe):
        raise HypothesisError("alpha must be a primitive element",
                              f"{field.format(g)} has order {field.order(g) if g else 0}")
    n2 = (q - 1) // r
    lg = field.dlog(g)
    i = np.arange(r)[:, None]
    t = np.arange(n2)[None, :]
    xs = field.exp_table[(lg * d * (i + r * t)) % (q - 1)]
    rows = tmap.table[psi.table[xs]]
    T = (q - 1) // (p - 1)
    prov = {"construction": "class2", "field": field.to_json(), "w": list(tmap.w), "r": r,
            "d": d, "psi": psi.to_spec(), "alpha": g, "n_prime": n2, "T": T,
            "lattice_period": T, "alphabet_kind": "tuple", "tuple_len": tmap.k}
    if unsafe:
        prov["unsafe"] = True
    return FhsSet.from_symbols(rows, prov)


# ---------------------------------------------------------------------------
# class 3
# ---------------------------------------------------------------------------

def class3_strict_condition(p: int, m: int, r: int) -> bool:
    """The stricter parameter condition r | p - 1 and gcd(r, 2m) = 1."""
    return (p - 1) % r == 0 and math.gcd(r, 2 * m) == 1


def construct_class3(tower: Tower, w: Sequence, r: int, f,
                     *, theta: int | None = None, unsafe: bool = False) -> FhsSet:
    """s^i_t = T_w(f(theta^(i + r t))) for i < r, t < (q^2-1)/r.

    Parameters
    ----------
    tower : Tower
        GF(q^2) over GF(q).
    w : sequence
        Base-field elements spanning GF(q) over GF(p).
    r : int
        Odd divisor of q - 1.
    f : DifferenceBalancedFunction or dict
        A verified d-form difference-balanced function, or its spec.
    theta : int, optional
        Override of the top generator; non-primitive only with ``unsafe``.
    """
    base, top = tower.base, tower.top
    if tower.n != 2:
        raise HypothesisError("the tower must be a quadratic extension", f"n = {tower.n}")
    p, m, q = base.p, base.m, base.q
    tmap = TraceVectorMap(base, w)
    if tmap.rank != m:
        raise HypothesisError("R(w) = m", f"rank {tmap.rank}, m = {m}")
    if r < 1 or r % 2 == 0 or (q - 1) % r:
        raise HypothesisError("r must be an odd factor of q - 1", f"r = {r}, q = {q}")
    if not class3_strict_condition(p, m, r):
        warnings.warn(f"r = {r} satisfies r odd, r | q - 1 but not r | p - 1 with gcd(r, 2m) = 1",
                      stacklevel=2)
    assert math.gcd(r, q + 1) == 1
    if isinstance(f, dict):
        f = dbf_create(f, tower)
    if not isinstance(f, DifferenceBalancedFunction) or f.tower is not tower and (
            f.tower.top != top or f.tower.base != base):
        raise HypothesisError("f must be a difference-balanced function on this tower")
    if not f.verified and not unsafe:
        raise HypothesisError("f must be exhaustively verified as difference-balanced")
    if f.d_form_degree is None and not unsafe:
        raise HypothesisError("f must be a d-form function")
    g = top.alpha.code if theta is None else top.code(theta)
    if g == 0 or (top.order(g) != top.q - 1 and not unsafe):
        raise HypothesisError("theta must be a primitive element of GF(q^2)",
                              f"{top.format(g)} has order {top.order(g) if g else 0}")
    n2 = (top.q - 1) // r
    lg = top.dlog(g)
    i = np.arange(r)[:, None]
    t = np.arange(n2)[None, :]
    xs = top.exp_table[(lg * (i + r * t)) % (top.q - 1)]
    rows = tmap.table[f.table[xs]]
    prov = {"construction": "class3", "tower": tower.to_json(), "w": list(tmap.w), "r": r,
            "f": f.to_spec(), "d_form_degree": f.d_form_degree, "theta": g,
            "n_prime": n2, "lattice_period": q + 1, "alphabet_kind": "tuple",
            "tuple_len": tmap.k}
    if unsafe:
        prov["unsafe"] = True
    return FhsSet.from_symbols(rows, prov)


# ---------------------------------------------------------------------------
# rebuild
# ---------------------------------------------------------------------------

def from_provenance(prov: dict) -> FhsSet:
    """Rebuild a class 1/2/3 set from its provenance record."""
    kind = prov.get("construction")
    unsafe = bool(prov.get("unsafe", False))
    if kind == "class1":
        field = GF.from_json(prov["field"], require_primitive=False)
        return construct_class1(field, prov["k"], prov["P"], prov["d"], prov["sigma"], prov["reps"],
                                enforce=prov.get("enforced", True))
    if kind == "class2":
        field = GF.from_json(prov["field"], require_primitive=False)
        psi = map_from_spec(field, prov["psi"])
        return construct_class2(field, prov["w"], prov["r"], prov["d"], psi,
                                alpha=prov.get("alpha"), unsafe=unsafe)
    if kind == "class3":
        tower = Tower.from_json(prov["tower"])
        return construct_class3(tower, prov["w"], prov["r"], prov["f"],
                                theta=prov.get("theta"), unsafe=unsafe)
    raise HypothesisError(f"cannot rebuild construction {kind!r}")
