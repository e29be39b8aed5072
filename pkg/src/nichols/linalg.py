"""Dense exact linear algebra over CycloNumber.

One Gauss-Jordan elimination core drives rref, kernels, span solving, and the
incremental span tracker used by the Nichols engine.  Internally rows hold
"raw" scalars (a bare mpq when phi(N) = 1, a coefficient tuple otherwise);
results are rewrapped as canonical CycloNumbers, so both paths are
bit-identical with the naive dense computation.  Pivoting is first-nonzero in
column order: deterministic across runs and platforms.
"""

from __future__ import annotations

from collections import namedtuple

from .cyclotomic import MPQ_ONE, MPQ_ZERO, CycloField, CycloNumber, _reduce
from .errors import DimensionMismatch


class NotInSpan:
    """Sentinel result of solve_in_span when the target is outside the span."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self):
        return False

    def __repr__(self):
        return "NotInSpan"


NOT_IN_SPAN = NotInSpan()


class FieldOps:
    """Raw-coefficient arithmetic for one field, with row-level helpers."""

    _cache: dict[int, "FieldOps"] = {}

    def __new__(cls, field: CycloField):
        inst = cls._cache.get(field.conductor)
        if inst is None:
            inst = super().__new__(cls)
            inst.field = field
            inst.phi = field.phi
            if inst.phi == 1:
                inst.zero = MPQ_ZERO
                inst.one = MPQ_ONE
            else:
                inst.zero = (MPQ_ZERO,) * inst.phi
                one = [MPQ_ZERO] * inst.phi
                one[0] = MPQ_ONE
                inst.one = tuple(one)
            cls._cache[field.conductor] = inst
        return inst

    # -- scalar conversions

    def lift(self, x: CycloNumber):
        return x.coeffs[0] if self.phi == 1 else x.coeffs

    def lower(self, r) -> CycloNumber:
        return CycloNumber(self.field, (r,) if self.phi == 1 else r)

    def lift_vec(self, xs):
        if self.phi == 1:
            return [x.coeffs[0] for x in xs]
        return [x.coeffs for x in xs]

    def lower_vec(self, rs):
        return [self.lower(r) for r in rs]

    # -- scalar arithmetic on raws

    def nonzero(self, r) -> bool:
        return bool(r) if self.phi == 1 else any(r)

    def add(self, a, b):
        if self.phi == 1:
            return a + b
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        if self.phi == 1:
            return a - b
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a):
        if self.phi == 1:
            return -a
        return tuple(-x for x in a)

    def mul(self, a, b):
        if self.phi == 1:
            return a * b
        phi = self.phi
        prod = [MPQ_ZERO] * (2 * phi - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        return _reduce(prod, self.field)

    def inv(self, a):
        if self.phi == 1:
            return 1 / a
        return self.lower(a).inv().coeffs

    # -- row helpers (return fresh lists)

    def scale_row(self, row, f):
        if self.phi == 1:
            return [f * x if x else x for x in row]
        mul = self.mul
        return [mul(f, x) if any(x) else x for x in row]

    def axpy_row(self, dst, src, f):
        """dst - f*src, elementwise."""
        if self.phi == 1:
            return [a - f * b if b else a for a, b in zip(dst, src)]
        mul, sub = self.mul, self.sub
        return [sub(a, mul(f, b)) if any(b) else a for a, b in zip(dst, src)]


def gauss_jordan(rows, ops: FieldOps):
    """In-place reduced row echelon form on raw rows; returns pivot columns."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    nonzero = ops.nonzero
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if nonzero(rows[i][c]):
                pr = i
                break
        if pr is None:
            continue
        if pr != r:
            rows[r], rows[pr] = rows[pr], rows[r]
        lead = rows[r][c]
        if lead != ops.one:
            rows[r] = ops.scale_row(rows[r], ops.inv(lead))
        for i in range(nrows):
            if i != r and nonzero(rows[i][c]):
                rows[i] = ops.axpy_row(rows[i], rows[r], rows[i][c])
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


class IncrementalSpan:
    """Feed vectors one at a time; learn rank, pivots, and combinations.

    insert() either accepts the vector as a new pivot (returning its ordinal)
    or returns the exact coefficients expressing it over the accepted pivots.
    The greedy order makes the accepted set the first independent subsequence,
    which is what gives the engine its lexicographically-least monomial bases.
    """

    def __init__(self, ops: FieldOps, ncols: int, track: bool = True):
        self.ops = ops
        self.ncols = ncols
        self.track = track
        self.lead = {}
        self.rows = []
        self.exprs = []
        self.npivots = 0

    def insert(self, raw_vec):
        ops = self.ops
        nonzero = ops.nonzero
        row = list(raw_vec)
        combo = [ops.zero] * self.npivots if self.track else None
        for c in range(self.ncols):
            if not nonzero(row[c]):
                continue
            idx = self.lead.get(c)
            if idx is None:
                continue
            f = row[c]
            row = ops.axpy_row(row, self.rows[idx], f)
            if self.track:
                expr = self.exprs[idx]
                for p, e in enumerate(expr):
                    if nonzero(e):
                        combo[p] = ops.add(combo[p], ops.mul(f, e))
        lead_col = None
        for c in range(self.ncols):
            if nonzero(row[c]):
                lead_col = c
                break
        if lead_col is None:
            return ("combo", combo)
        lv_inv = ops.inv(row[lead_col])
        row = ops.scale_row(row, lv_inv)
        ordinal = self.npivots
        if self.track:
            expr = [ops.neg(ops.mul(lv_inv, combo[p])) for p in range(ordinal)]
            expr.append(lv_inv)
            self.exprs.append(expr)
        self.lead[lead_col] = len(self.rows)
        self.rows.append(row)
        self.npivots += 1
        return ("pivot", ordinal)


RrefResult = namedtuple("RrefResult", ["matrix", "pivots"])


class Matrix:
    """Immutable-by-convention dense matrix of CycloNumbers."""

    __slots__ = ("field", "rows", "cols", "entries")

    def __init__(self, field: CycloField, entries):
        self.field = field
        self.entries = [list(row) for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        for row in self.entries:
            if len(row) != self.cols:
                raise DimensionMismatch("ragged matrix rows")

    @classmethod
    def from_rows(cls, field, rows):
        conv = field.scalar
        return cls(field, [[conv(x) for x in row] for row in rows])

    @classmethod
    def identity(cls, field, n):
        one, zero = field.one(), field.zero()
        return cls(field, [[one if i == j else zero for j in range(n)]
                           for i in range(n)])

    @classmethod
    def zeros(cls, field, rows, cols):
        zero = field.zero()
        return cls(field, [[zero] * cols for _ in range(rows)])

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.entries == other.entries
                and self.rows == other.rows and self.cols == other.cols)

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols} over Q(z{self.field.conductor}))"

    def transpose(self) -> "Matrix":
        return Matrix(self.field,
                      [[self.entries[i][j] for i in range(self.rows)]
                       for j in range(self.cols)])

    def mat_vec(self, vec):
        if len(vec) != self.cols:
            raise DimensionMismatch("matrix-vector shape mismatch",
                                    cols=self.cols, vec=len(vec))
        out = []
        zero = self.field.zero()
        for row in self.entries:
            acc = zero
            for a, x in zip(row, vec):
                if a and x:
                    acc = acc + a * x
            out.append(acc)
        return out

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise DimensionMismatch("matrix-matrix shape mismatch")
            cols = list(zip(*other.entries)) if other.entries else []
            zero = self.field.zero()
            out = []
            for row in self.entries:
                out_row = []
                for col in cols:
                    acc = zero
                    for a, b in zip(row, col):
                        if a and b:
                            acc = acc + a * b
                    out_row.append(acc)
                out.append(out_row)
            return Matrix(self.field, out)
        if isinstance(other, list):
            return self.mat_vec(other)
        return NotImplemented

    # -- dump format: array-of-arrays of scalar strings

    def to_lists(self):
        return [[str(x) for x in row] for row in self.entries]

    @classmethod
    def from_lists(cls, field, lists):
        return cls.from_rows(field, lists)


def rref(m: Matrix) -> RrefResult:
    """Unique reduced row echelon form plus its pivot columns."""
    ops = FieldOps(m.field)
    raw = [ops.lift_vec(row) for row in m.entries]
    pivots = gauss_jordan(raw, ops)
    out = Matrix(m.field, [ops.lower_vec(row) for row in raw])
    return RrefResult(out, pivots)


def rank(m: Matrix) -> int:
    return len(rref(m).pivots)


def kernel_basis(m: Matrix):
    """Basis of the right null space; every vector satisfies m*v = 0 exactly."""
    red, pivots = rref(m)
    pivot_set = set(pivots)
    free_cols = [c for c in range(m.cols) if c not in pivot_set]
    basis = []
    zero, one = m.field.zero(), m.field.one()
    for f in free_cols:
        vec = [zero] * m.cols
        vec[f] = one
        for r, c in enumerate(pivots):
            vec[c] = -red.entries[r][f]
        basis.append(vec)
    return basis


def solve_in_span(basis, target):
    """Exact coordinates of target over the given vectors, or NOT_IN_SPAN."""
    nbasis = len(basis)
    dim = len(target)
    for v in basis:
        if len(v) != dim:
            raise DimensionMismatch("basis vector length differs from target",
                                    expected=dim, got=len(v))
    if nbasis == 0:
        if any(x for x in target):
            return NOT_IN_SPAN
        return []
    if dim == 0:
        raise DimensionMismatch("cannot infer the field from zero-length vectors")
    field = target[0].field
    ops = FieldOps(field)
    span = IncrementalSpan(ops, dim, track=True)
    ordinals = []
    for v in basis:
        kind, data = span.insert(ops.lift_vec(v))
        ordinals.append((kind, data))
    kind, data = span.insert(ops.lift_vec(target))
    if kind == "pivot":
        return NOT_IN_SPAN
    # data expresses target over the accepted pivots; spread back over the
    # original list, giving dependent basis vectors coefficient zero.
    coeffs = [field.zero()] * nbasis
    for i, (k, d) in enumerate(ordinals):
        if k == "pivot":
            if d < len(data):
                coeffs[i] = ops.lower(data[d])
    return coeffs
