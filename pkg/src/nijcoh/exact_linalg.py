"""Exact sparse linear algebra over the rationals and prime fields.

Matrices are immutable, stored column-major as ``{col: {row: value}}`` with no
explicit zeros.  Over QQ the entries are :class:`fractions.Fraction`; rank,
kernel and solve run a fraction-free elimination on integer rows (rows are
cleared of denominators and kept primitive), so coefficient growth stays
bounded by content removal.  Over GF(p) entries are ints in ``[0, p)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

DEFAULT_PRIME = 32003


class Field:
    """Base class for the two supported coefficient fields."""

    name = "field"

    def convert(self, x):
        raise NotImplementedError

    def is_zero(self, x) -> bool:
        return x == 0

    def __eq__(self, other):
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self):
        return hash((type(self).__name__, tuple(sorted(self.__dict__.items()))))

    def __repr__(self):
        return self.name


class RationalField(Field):
    name = "QQ"

    def convert(self, x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, str):
            return parse_scalar(x)
        return Fraction(x)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)


class PrimeField(Field):
    def __init__(self, p: int = DEFAULT_PRIME):
        if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p

    @property
    def name(self):
        return f"GF({self.p})"

    def convert(self, x) -> int:
        if isinstance(x, str):
            x = parse_scalar(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator of {x} vanishes mod {self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)


QQ = RationalField()


def GF(p: int = DEFAULT_PRIME) -> PrimeField:
    return PrimeField(p)


def field_from_name(name: str) -> Field:
    name = name.strip()
    if name in ("QQ", "Q", "rational", "rationals"):
        return QQ
    if name.startswith("GF(") and name.endswith(")"):
        return PrimeField(int(name[3:-1]))
    raise ValueError(f"unknown field {name!r}")


def parse_scalar(s) -> Fraction:
    """Parse ``"p/q"`` or an integer (string or int) into a Fraction."""
    if isinstance(s, bool):
        raise ValueError(f"malformed scalar {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, Fraction):
        return s
    if not isinstance(s, str):
        raise ValueError(f"malformed scalar {s!r}")
    text = s.strip()
    try:
        if "/" in text:
            num, den = text.split("/")
            den_i = int(den)
            if den_i == 0:
                raise ValueError(f"zero denominator in {s!r}")
            return Fraction(int(num), den_i)
        return Fraction(int(text))
    except (ValueError, TypeError) as exc:
        raise ValueError(f"malformed scalar {s!r}") from exc


def format_scalar(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True, eq=False)
class Matrix:
    rows: int
    cols: int
    _cols: Mapping[int, Mapping[int, object]]
    field: Field = QQ

    # -- construction -----------------------------------------------------

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping[int, object]], field: Field = QQ):
        store: Dict[int, Dict[int, object]] = {}
        for c, col in enumerate(columns):
            clean = {}
            for r, v in col.items():
                if not 0 <= r < rows:
                    raise IndexError(f"row {r} out of range for {rows} rows")
                v = field.convert(v)
                if not field.is_zero(v):
                    clean[r] = v
            if clean:
                store[c] = clean
        return cls(rows, len(columns), store, field)

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Mapping[Tuple[int, int], object], field: Field = QQ):
        store: Dict[int, Dict[int, object]] = {}
        for (r, c), v in entries.items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) out of range for {rows}x{cols}")
            v = field.convert(v)
            if not field.is_zero(v):
                store.setdefault(c, {})[r] = v
        return cls(rows, cols, store, field)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[object]], field: Field = QQ):
        rows = len(data)
        cols = len(data[0]) if rows else 0
        entries = {(r, c): v for r, row in enumerate(data) for c, v in enumerate(row) if v != 0}
        return cls.from_entries(rows, cols, entries, field)

    @classmethod
    def zero(cls, rows: int, cols: int, field: Field = QQ):
        return cls(rows, cols, {}, field)

    @classmethod
    def identity(cls, n: int, field: Field = QQ):
        one = field.convert(1)
        return cls(n, n, {i: {i: one} for i in range(n)}, field)

    # -- access -----------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def column(self, c: int) -> Dict[int, object]:
        return dict(self._cols.get(c, {}))

    def entries(self) -> Dict[Tuple[int, int], object]:
        return {(r, c): v for c, col in self._cols.items() for r, v in col.items()}

    def nnz(self) -> int:
        return sum(len(col) for col in self._cols.values())

    def __getitem__(self, rc: Tuple[int, int]):
        r, c = rc
        return self._cols.get(c, {}).get(r, self.field.convert(0))

    def to_dense(self) -> List[List[object]]:
        zero = self.field.convert(0)
        out = [[zero] * self.cols for _ in range(self.rows)]
        for c, col in self._cols.items():
            for r, v in col.items():
                out[r][c] = v
        return out

    def is_zero(self) -> bool:
        return not self._cols

    def nonzero_columns(self) -> List[int]:
        return sorted(self._cols)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.entries() == other.entries()

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, nnz={self.nnz()}, field={self.field!r})"

    # -- arithmetic -------------------------------------------------------

    def to_field(self, field: Field) -> "Matrix":
        return Matrix.from_entries(self.rows, self.cols, self.entries(), field)

    def transpose(self) -> "Matrix":
        store: Dict[int, Dict[int, object]] = {}
        for c, col in self._cols.items():
            for r, v in col.items():
                store.setdefault(r, {})[c] = v
        return Matrix(self.cols, self.rows, store, self.field)

    def scale(self, s) -> "Matrix":
        f = self.field
        s = f.convert(s)
        if f.is_zero(s):
            return Matrix.zero(self.rows, self.cols, f)
        return Matrix(self.rows, self.cols,
                      {c: {r: f.mul(v, s) for r, v in col.items()} for c, col in self._cols.items()}, f)

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        f = self.field
        store = {c: dict(col) for c, col in self._cols.items()}
        for c, col in other._cols.items():
            tgt = store.setdefault(c, {})
            for r, v in col.items():
                s = f.add(tgt.get(r, 0), v)
                if f.is_zero(s):
                    tgt.pop(r, None)
                else:
                    tgt[r] = s
            if not tgt:
                del store[c]
        return Matrix(self.rows, self.cols, store, f)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        f = self.field
        store: Dict[int, Dict[int, object]] = {}
        for c, col in other._cols.items():
            acc: Dict[int, object] = {}
            for k, v in col.items():
                left = self._cols.get(k)
                if not left:
                    continue
                for r, w in left.items():
                    acc[r] = f.add(acc.get(r, 0), f.mul(w, v))
            acc = {r: v for r, v in acc.items() if not f.is_zero(v)}
            if acc:
                store[c] = acc
        return Matrix(self.rows, other.cols, store, f)

    def apply(self, vec: Sequence[object]) -> List[object]:
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for {self.cols} columns")
        f = self.field
        out = [f.convert(0)] * self.rows
        for c, col in self._cols.items():
            x = f.convert(vec[c])
            if f.is_zero(x):
                continue
            for r, v in col.items():
                out[r] = f.add(out[r], f.mul(v, x))
        return out

    # -- rank / kernel / solve -------------------------------------------

    def rank(self) -> int:
        return len(_echelon(_rows_of(self), self.field))

    def kernel_basis(self) -> List[List[object]]:
        """Basis of {v : m v = 0}, one vector per non-pivot column."""
        pivots = _rref(_echelon(_rows_of(self), self.field), self.field)
        return _kernel_from_rref(pivots, self.cols, self.field)

    def solve(self, b: Sequence[object]) -> Optional[List[object]]:
        """Some x with m x = b, or None when the system is inconsistent."""
        if len(b) != self.rows:
            raise ValueError(f"right-hand side of length {len(b)} for {self.rows} rows")
        f = self.field
        rows = _rows_of(self)
        aug = self.cols
        for r, v in enumerate(b):
            v = f.convert(v)
            if not f.is_zero(v):
                rows[r][aug] = v
        pivots = _rref(_echelon(rows, f), f)
        if aug in pivots:
            return None
        x = [f.convert(0)] * self.cols
        for pc, row in pivots.items():
            lead = row[pc]
            rhs = row.get(aug, 0)
            x[pc] = _div(rhs, lead, f)
        return x


# -- block helpers -----------------------------------------------------------

def block(blocks: Sequence[Sequence[Optional[Matrix]]], row_sizes: Sequence[int], col_sizes: Sequence[int],
          field: Field = QQ) -> Matrix:
    """Assemble a block matrix; ``None`` entries are zero blocks."""
    store: Dict[int, Dict[int, object]] = {}
    r_off = [0]
    for s in row_sizes:
        r_off.append(r_off[-1] + s)
    c_off = [0]
    for s in col_sizes:
        c_off.append(c_off[-1] + s)
    for bi, brow in enumerate(blocks):
        for bj, m in enumerate(brow):
            if m is None:
                continue
            if m.shape != (row_sizes[bi], col_sizes[bj]):
                raise ValueError(f"block ({bi},{bj}) has shape {m.shape}, expected "
                                 f"{(row_sizes[bi], col_sizes[bj])}")
            for c, col in m._cols.items():
                tgt = store.setdefault(c + c_off[bj], {})
                for r, v in col.items():
                    rr = r + r_off[bi]
                    s = field.add(tgt.get(rr, 0), v)
                    if field.is_zero(s):
                        tgt.pop(rr, None)
                    else:
                        tgt[rr] = s
    store = {c: col for c, col in store.items() if col}
    return Matrix(r_off[-1], c_off[-1], store, field)


def rank(m: Matrix) -> int:
    return m.rank()


def kernel_basis(m: Matrix) -> List[List[object]]:
    return m.kernel_basis()


def solve(m: Matrix, b: Sequence[object]) -> Optional[List[object]]:
    return m.solve(b)


# -- elimination internals -----------------------------------------------------
#
# Rows are dicts {col: value}.  Over QQ values are ints (rows scaled to
# primitive integer vectors); over GF(p) values are residues.

def _rows_of(m: Matrix) -> List[Dict[int, object]]:
    rows: List[Dict[int, object]] = [dict() for _ in range(m.rows)]
    for c, col in m._cols.items():
        for r, v in col.items():
            rows[r][c] = v
    return rows


def _primitive(row: Dict[int, object]) -> Dict[int, int]:
    den = 1
    for v in row.values():
        d = Fraction(v).denominator
        den = den * d // gcd(den, d)
    ints = {c: int(Fraction(v) * den) for c, v in row.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    lead = ints[min(ints)]
    if lead < 0:
        g = -g
    return {c: v // g for c, v in ints.items()}


def _div(a, b, f: Field):
    if isinstance(f, RationalField):
        return Fraction(a) / Fraction(b)
    return f.mul(a, f.inv(b))


def _echelon(rows: Iterable[Dict[int, object]], f: Field) -> Dict[int, Dict[int, object]]:
    """Incremental elimination; returns {pivot_col: row} with row's min col == pivot_col."""
    pivots: Dict[int, Dict[int, object]] = {}
    rational = isinstance(f, RationalField)
    for row in sorted((r for r in rows if r), key=len):
        row = _primitive(row) if rational else {c: v % f.p for c, v in row.items() if v % f.p}
        while row:
            c = min(row)
            piv = pivots.get(c)
            if piv is None:
                if not rational:
                    inv = f.inv(row[c])
                    row = {k: v * inv % f.p for k, v in row.items()}
                pivots[c] = row
                break
            row = _eliminate(row, piv, c, f)
    return pivots


def _eliminate(row, piv, c, f: Field):
    if isinstance(f, RationalField):
        a, b = piv[c], row[c]
        g = gcd(a, b)
        a, b = a // g, b // g
        out = {k: a * v for k, v in row.items()}
        for k, v in piv.items():
            s = out.get(k, 0) - b * v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return _primitive(out) if out else out
    p = f.p
    b = row[c]
    out = dict(row)
    for k, v in piv.items():
        s = (out.get(k, 0) - b * v) % p
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def _rref(pivots: Dict[int, Dict[int, object]], f: Field) -> Dict[int, Dict[int, object]]:
    """Clear entries above each pivot (back-substitution on the echelon form)."""
    order = sorted(pivots, reverse=True)
    done: Dict[int, Dict[int, object]] = {}
    for c in order:
        row = pivots[c]
        for pc in sorted(done):
            if pc in row:
                row = _eliminate(row, done[pc], pc, f)
        done[c] = row
    return done


def _kernel_from_rref(pivots: Dict[int, Dict[int, object]], ncols: int, f: Field) -> List[List[object]]:
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    zero, one = f.convert(0), f.convert(1)
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for pc, row in pivots.items():
            if fc in row:
                v[pc] = f.neg(_div(row[fc], row[pc], f))
        basis.append(v)
    return basis


def kron(*mats: Matrix) -> Matrix:
    """Kronecker product, left factor outermost."""
    if not mats:
        raise ValueError("kron needs at least one factor")
    out = mats[0]
    for m in mats[1:]:
        f = out.field
        store: Dict[int, Dict[int, object]] = {}
        for ca, cola in out._cols.items():
            for cb, colb in m._cols.items():
                col = {ra * m.rows + rb: f.mul(va, vb) for ra, va in cola.items() for rb, vb in colb.items()}
                store[ca * m.cols + cb] = col
        out = Matrix(out.rows * m.rows, out.cols * m.cols, store, f)
    return out


def identity_matrix(n: int, field: Field = QQ) -> Matrix:
    return Matrix.identity(n, field)
