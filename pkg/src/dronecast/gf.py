"""
Finite-field arithmetic for GF(p^m) and exact matrix operations over it.

Elements of GF(q), q = p^m, are plain integers in [0, q).  For extension
fields the integer e encodes the polynomial sum(d_i * x^i), where
(d_0, d_1, ...) are the base-p digits of e.  Multiplication goes through
log/antilog tables built from a generator of the multiplicative group;
addition is digit-wise mod p (XOR when p = 2).  Full q x q tables are kept
so that both scalar and vectorized access are cheap.

Default reduction polynomials are chosen deterministically: the monic
degree-m polynomial with the smallest base-p encoding of its non-leading
coefficients that is irreducible over GF(p).  This yields the usual
choices, e.g. x^2+x+1 for GF(4), x^3+x+1 for GF(8), x^4+x+1 for GF(16)
and x^2+1 for GF(9).
"""

from __future__ import annotations

import numpy as np

DEFAULT_MAX_ORDER = 256


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# Polynomial helpers over GF(p).  A polynomial is a list of coefficients in
# ascending degree order with no trailing zeros (except [0] itself).
# ---------------------------------------------------------------------------

def _poly_trim(c: list[int]) -> list[int]:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a: list[int], mod: list[int], p: int) -> list[int]:
    # mod must be monic
    a = list(a)
    dm = len(mod) - 1
    while len(a) - 1 >= dm and any(a):
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i, c in enumerate(mod):
                a[shift + i] = (a[shift + i] - lead * c) % p
        _poly_trim(a)
        if len(a) - 1 < dm:
            break
    return _poly_trim(a)


def _poly_is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg(poly)/2."""
    m = len(poly) - 1
    if m < 1:
        return False
    if poly[0] == 0 and m > 1:
        return False  # divisible by x
    for deg in range(1, m // 2 + 1):
        for enc in range(p**deg):
            div = _digits(enc, p, deg) + [1]
            if _poly_mod(poly, div, p) == [0]:
                return False
    return True


def _digits(e: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        out.append(e % p)
        e //= p
    return out


def _undigits(d, p: int) -> int:
    v = 0
    for c in reversed(d):
        v = v * p + int(c)
    return v


def default_reduction_poly(p: int, m: int) -> tuple[int, ...]:
    """Smallest-encoding monic irreducible polynomial of degree m over GF(p)."""
    for enc in range(p**m):
        cand = _digits(enc, p, m) + [1]
        if _poly_is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # cannot happen


class GaloisField:
    """
    GF(p^m) with precomputed arithmetic tables.

    Parameters
    ----------
    p : int
        Field characteristic; must be prime.
    m : int
        Extension degree (q = p^m elements).
    reduction_poly : sequence of int, optional
        Monic degree-m polynomial over GF(p), coefficients in ascending
        degree order (length m+1, last entry 1).  Must be irreducible.
        If omitted, the deterministic default for (p, m) is used.
    max_order : int
        Refuse fields with q above this cap (tables are dense in q).
    """

    def __init__(self, p: int, m: int = 1, reduction_poly=None, *,
                 max_order: int = DEFAULT_MAX_ORDER):
        if not _is_prime(p):
            raise ValueError(f"p must be prime, got {p}")
        if m < 1:
            raise ValueError(f"extension degree must be >= 1, got {m}")
        q = p**m
        if q > max_order:
            raise ValueError(f"unsupported field: q = {q} exceeds cap {max_order}")

        if reduction_poly is None:
            reduction_poly = default_reduction_poly(p, m)
        else:
            reduction_poly = tuple(int(c) % p for c in reduction_poly)
            if len(reduction_poly) != m + 1 or reduction_poly[-1] != 1:
                raise ValueError("reduction polynomial must be monic of degree m")
            if not _poly_is_irreducible(list(reduction_poly), p):
                raise ValueError(f"reduction polynomial {reduction_poly} is "
                                 f"reducible over GF({p})")

        self.p = p
        self.m = m
        self.q = q
        self.reduction_poly = reduction_poly
        self._build_tables()

    # -- construction -------------------------------------------------------

    def _elem_mul(self, a: int, b: int) -> int:
        prod = _poly_mul(_digits(a, self.p, self.m), _digits(b, self.p, self.m), self.p)
        return _undigits(_poly_mod(prod, list(self.reduction_poly), self.p), self.p)

    def _find_generator(self) -> int:
        order = self.q - 1
        for g in range(1, self.q):
            x, n = g, 1
            while x != 1:
                x = self._elem_mul(x, g)
                n += 1
                if n > order:
                    break
            if n == order or (order == 1 and g == 1):
                return g
        raise AssertionError("no generator found")  # cannot happen for a field

    def _build_tables(self) -> None:
        p, m, q = self.p, self.m, self.q

        g = self._find_generator()
        exp = np.zeros(max(q - 1, 1), dtype=np.int16)
        log = np.zeros(q, dtype=np.int16)
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self._elem_mul(x, g)
        self.generator = g
        self._exp = exp
        self._log = log

        # digit matrix: D[e] = base-p digits of e
        digs = np.array([_digits(e, p, m) for e in range(q)], dtype=np.int16)
        pows = p ** np.arange(m, dtype=np.int64)
        self.add_table = (((digs[:, None, :] + digs[None, :, :]) % p) @ pows).astype(np.int16)
        self.sub_table = (((digs[:, None, :] - digs[None, :, :]) % p) @ pows).astype(np.int16)
        self.neg_table = (((-digs) % p) @ pows).astype(np.int16)

        logs = log.astype(np.int64)
        self.mul_table = exp[(logs[:, None] + logs[None, :]) % (q - 1)] if q > 2 \
            else np.array([[0, 0], [0, 1]], dtype=np.int16)
        if q > 2:
            self.mul_table = self.mul_table.copy()
            self.mul_table[0, :] = 0
            self.mul_table[:, 0] = 0
        self.inv_table = np.zeros(q, dtype=np.int16)
        for a in range(1, q):
            self.inv_table[a] = exp[(q - 1 - log[a]) % (q - 1)]

        # plain-list views: faster than numpy for scalar-heavy elimination
        self._add = self.add_table.tolist()
        self._sub = self.sub_table.tolist()
        self._mul = self.mul_table.tolist()
        self._inv = self.inv_table.tolist()

    # -- scalar arithmetic ---------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._sub[a][b]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return self._inv[a]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inv(a), -n
        out = 1
        for _ in range(n):
            out = self.mul(out, a)
        return out

    def elements(self) -> range:
        return range(self.q)

    def __eq__(self, other) -> bool:
        return (isinstance(other, GaloisField)
                and (self.p, self.m, self.reduction_poly)
                == (other.p, other.m, other.reduction_poly))

    def __hash__(self) -> int:
        return hash((self.p, self.m, self.reduction_poly))

    def __repr__(self) -> str:
        return f"GaloisField(p={self.p}, m={self.m}, poly={list(self.reduction_poly)})"


def _rref_rows(field: GaloisField, rows: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form of `rows` (consumed); returns (rref, pivot cols).

    Pivot selection: first nonzero entry scanning top-to-bottom; exact field
    arithmetic needs no pivoting heuristics.
    """
    mul, sub, inv = field._mul, field._sub, field._inv
    ncols = len(rows[0]) if rows else 0
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        prow = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                prow = i
                break
        if prow is None:
            continue
        rows[r], rows[prow] = rows[prow], rows[r]
        pv = rows[r][c]
        if pv != 1:
            mrow = mul[inv[pv]]
            rows[r] = [mrow[x] for x in rows[r]]
        prv = rows[r]
        for i in range(len(rows)):
            f = rows[i][c]
            if f and i != r:
                mf = mul[f]
                ri = rows[i]
                rows[i] = [sub[ri[j]][mf[prv[j]]] for j in range(ncols)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank_and_decodable(field: GaloisField, rows: list[list[int]]) -> tuple[int, int]:
    """(rank, number of standard basis vectors in the row space).

    The second count is the number of source packets recoverable from coded
    rows: e_b lies in the row space iff the RREF contains the row e_b itself,
    i.e. a row with exactly one nonzero entry.
    """
    rref, pivots = _rref_rows(field, [list(r) for r in rows])
    units = 0
    for i in range(len(pivots)):
        nz = 0
        for x in rref[i]:
            if x:
                nz += 1
                if nz > 1:
                    break
        if nz == 1:
            units += 1
    return len(pivots), units


class GfMatrix:
    """A matrix over a GaloisField; entries are an int16 ndarray in [0, q)."""

    def __init__(self, field: GaloisField, entries):
        arr = np.array(entries, dtype=np.int16)
        if arr.ndim != 2:
            if arr.ndim == 1 and arr.size == 0:
                arr = arr.reshape(0, 0)
            else:
                raise ValueError("entries must be two-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= field.q):
            raise ValueError(f"entries must lie in [0, {field.q})")
        self.field = field
        self.entries = arr

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def rank(self) -> int:
        _, pivots = _rref_rows(self.field, self.entries.tolist())
        return len(pivots)

    def rref(self) -> "GfMatrix":
        rows, _ = _rref_rows(self.field, self.entries.tolist())
        if not rows:
            return GfMatrix(self.field, self.entries.copy())
        return GfMatrix(self.field, rows)

    def recoverable_sources(self) -> int:
        """Number of standard basis vectors e_b contained in the row space.

        Equals self.cols exactly when rank() == cols (full decoding).
        """
        _, units = rank_and_decodable(self.field, self.entries.tolist())
        return units

    def with_row_appended(self, row) -> "GfMatrix":
        row = np.asarray(row, dtype=np.int16).reshape(1, -1)
        return GfMatrix(self.field, np.vstack([self.entries, row]))

    def __eq__(self, other) -> bool:
        return (isinstance(other, GfMatrix) and self.field == other.field
                and self.entries.shape == other.entries.shape
                and bool(np.all(self.entries == other.entries)))

    def __repr__(self) -> str:
        return f"GfMatrix(q={self.field.q}, {self.rows}x{self.cols})"
