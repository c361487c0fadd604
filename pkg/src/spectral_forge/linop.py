"""Dense operators over explicitly indexed finite bases.

Everything downstream (model building, Dirac assembly, seminorm evaluation)
manipulates ``LinOp`` values: a dense complex matrix tied to a ``BasisSpace``
that says what the rows and columns mean.  Binary operations refuse to mix
operands living on different spaces — dimensions matching by accident is not
enough.  Nothing in this module ever reinterprets an index.

Spaces are structural values: two ``Line(8)`` instances are the same space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "SpaceMismatch",
    "ContractViolation",
    "ResourceLimit",
    "BasisSpace",
    "HalfLine",
    "Line",
    "Qubit",
    "Product",
    "DirectSum",
    "LinOp",
    "Spectrum",
    "identity",
    "zeros",
    "diagonal_op",
    "from_matrix",
    "tensor",
    "commutator",
    "anticommutator",
    "opnorm",
    "eig_hermitian",
    "block",
    "direct_sum",
    "get_dense_cap",
    "set_dense_cap",
]

HERMITIAN_TOL = 1e-12
EIG_MERGE_TOL = 1e-9

_DENSE_CAP = 4096


def get_dense_cap() -> int:
    """Current cap on dense dimensions for tensor products and eigensolves."""
    return _DENSE_CAP


def set_dense_cap(n: int) -> int:
    """Set the dense-dimension cap; returns the previous value."""
    global _DENSE_CAP
    if n < 2:
        raise ContractViolation(f"dense cap must be >= 2, got {n}")
    old = _DENSE_CAP
    _DENSE_CAP = int(n)
    return old


class SpaceMismatch(ValueError):
    """Operands live on different basis spaces."""


class ContractViolation(ValueError):
    """An input violates a documented precondition."""


class ResourceLimit(RuntimeError):
    """A dense operation would exceed the configured size cap."""


# ---------------------------------------------------------------------------
# basis spaces
# ---------------------------------------------------------------------------


class BasisSpace:
    """Common interface: ``dim``, ``labels()``, ``index_of``, ``label_of``."""

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def labels(self) -> list:
        raise NotImplementedError

    def index_of(self, label) -> int:
        try:
            return self._index_map()[label]
        except KeyError:
            raise ContractViolation(f"label {label!r} not in {self}") from None

    def label_of(self, i: int):
        lab = self.labels()
        if not 0 <= i < len(lab):
            raise ContractViolation(f"index {i} out of range for {self}")
        return lab[i]

    def _index_map(self) -> dict:
        # rebuilt on demand; spaces are tiny value objects
        return {lab: i for i, lab in enumerate(self.labels())}


@dataclass(frozen=True)
class HalfLine(BasisSpace):
    """Basis e_0 .. e_{n-1} (one-sided ladder truncated at n levels)."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ContractViolation(f"HalfLine needs n >= 1, got {self.n}")

    @property
    def dim(self) -> int:
        return self.n

    def labels(self) -> list:
        return list(range(self.n))


@dataclass(frozen=True)
class Line(BasisSpace):
    """Symmetric window e_{-w} .. e_{w} (two-sided ladder, 2w+1 levels)."""

    window: int

    def __post_init__(self):
        if self.window < 0:
            raise ContractViolation(f"Line needs window >= 0, got {self.window}")

    @property
    def dim(self) -> int:
        return 2 * self.window + 1

    def labels(self) -> list:
        return list(range(-self.window, self.window + 1))


@dataclass(frozen=True)
class Qubit(BasisSpace):
    """Two-dimensional space with labels 1 and 2."""

    @property
    def dim(self) -> int:
        return 2

    def labels(self) -> list:
        return [1, 2]


@dataclass(frozen=True)
class Product(BasisSpace):
    """Tensor product; labels are (left_label, right_label), right fastest."""

    left: BasisSpace
    right: BasisSpace

    @property
    def dim(self) -> int:
        return self.left.dim * self.right.dim

    def labels(self) -> list:
        return [(a, b) for a in self.left.labels() for b in self.right.labels()]


@dataclass(frozen=True)
class DirectSum(BasisSpace):
    """Direct sum; labels are (slot, part_label), slots kept in order."""

    parts: tuple[BasisSpace, ...]

    def __post_init__(self):
        if len(self.parts) < 1:
            raise ContractViolation("DirectSum needs at least one part")

    @property
    def dim(self) -> int:
        return sum(p.dim for p in self.parts)

    def labels(self) -> list:
        out = []
        for k, p in enumerate(self.parts):
            out.extend((k, lab) for lab in p.labels())
        return out

    def offsets(self) -> list[int]:
        """Starting row of each summand inside the concatenated basis."""
        offs, acc = [], 0
        for p in self.parts:
            offs.append(acc)
            acc += p.dim
        return offs


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinOp:
    """An operator on a ``BasisSpace``: immutable dense complex matrix.

    ``hermitian`` is a *certified* flag: it is set only when
    max|M - M†| <= 1e-12 was checked at construction.  Algebra propagates it
    conservatively (sums of hermitians are hermitian, products are not
    assumed anything).
    """

    space: BasisSpace
    mat: np.ndarray = field(repr=False)
    hermitian: bool = False

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=np.complex128)
        if m.shape != (self.space.dim, self.space.dim):
            raise ContractViolation(
                f"matrix shape {m.shape} does not match space dim {self.space.dim}"
            )
        m = np.ascontiguousarray(m)
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)
        if self.hermitian and not _is_hermitian(m):
            raise ContractViolation("hermitian flag set on a non-hermitian matrix")

    # -- algebra ------------------------------------------------------------

    def _same_space(self, other: "LinOp"):
        if self.space != other.space:
            raise SpaceMismatch(f"{self.space} vs {other.space}")

    def __add__(self, other: "LinOp") -> "LinOp":
        self._same_space(other)
        return LinOp(self.space, self.mat + other.mat,
                     hermitian=self.hermitian and other.hermitian)

    def __sub__(self, other: "LinOp") -> "LinOp":
        self._same_space(other)
        return LinOp(self.space, self.mat - other.mat,
                     hermitian=self.hermitian and other.hermitian)

    def __neg__(self) -> "LinOp":
        return LinOp(self.space, -self.mat, hermitian=self.hermitian)

    def __mul__(self, c: complex) -> "LinOp":
        c = complex(c)
        herm = self.hermitian and c.imag == 0.0
        return LinOp(self.space, c * self.mat, hermitian=herm)

    __rmul__ = __mul__

    def __matmul__(self, other: "LinOp") -> "LinOp":
        self._same_space(other)
        return LinOp(self.space, self.mat @ other.mat)

    def adjoint(self) -> "LinOp":
        return LinOp(self.space, self.mat.conj().T, hermitian=self.hermitian)

    def certify_hermitian(self, tol: float = HERMITIAN_TOL) -> "LinOp":
        """Return self with the hermitian flag set, or raise if it isn't."""
        if not _is_hermitian(self.mat, tol):
            raise ContractViolation(
                f"matrix is not hermitian within {tol:g} "
                f"(defect {_hermitian_defect(self.mat):.3e})"
            )
        return LinOp(self.space, self.mat, hermitian=True)

    # -- inspection ----------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.space.dim

    def entry(self, row_label, col_label) -> complex:
        return complex(self.mat[self.space.index_of(row_label),
                                self.space.index_of(col_label)])

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.mat)) <= tol) if self.mat.size else True

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.mat))) if self.mat.size else 0.0


def _is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return _hermitian_defect(m) <= tol


def _hermitian_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


# -- constructors -----------------------------------------------------------


def identity(space: BasisSpace) -> LinOp:
    return LinOp(space, np.eye(space.dim, dtype=np.complex128), hermitian=True)


def zeros(space: BasisSpace) -> LinOp:
    return LinOp(space, np.zeros((space.dim, space.dim), dtype=np.complex128),
                 hermitian=True)


def diagonal_op(space: BasisSpace, values: Callable | Iterable) -> LinOp:
    """Diagonal operator; ``values`` is a callable on labels or a sequence.

    Real diagonals yield a certified hermitian operator.
    """
    if callable(values):
        diag = np.array([values(lab) for lab in space.labels()], dtype=np.complex128)
    else:
        diag = np.asarray(list(values), dtype=np.complex128)
        if diag.shape != (space.dim,):
            raise ContractViolation(
                f"diagonal length {diag.shape} does not match dim {space.dim}")
    herm = bool(np.all(diag.imag == 0.0))
    return LinOp(space, np.diag(diag), hermitian=herm)


def from_matrix(space: BasisSpace, mat: np.ndarray) -> LinOp:
    """Wrap a raw matrix, auto-certifying hermiticity when it holds exactly enough."""
    m = np.asarray(mat, dtype=np.complex128)
    return LinOp(space, m, hermitian=_is_hermitian(m))


# -- structural operations ----------------------------------------------------


def tensor(a: LinOp, b: LinOp) -> LinOp:
    """Kronecker product on ``Product(a.space, b.space)`` (right factor fastest)."""
    out_dim = a.dim * b.dim
    if out_dim > _DENSE_CAP:
        raise ResourceLimit(
            f"tensor product dimension {out_dim} exceeds dense cap {_DENSE_CAP}; "
            "use a factored representation instead")
    return LinOp(Product(a.space, b.space), np.kron(a.mat, b.mat),
                 hermitian=a.hermitian and b.hermitian)


def commutator(a: LinOp, b: LinOp) -> LinOp:
    a._same_space(b)
    return LinOp(a.space, a.mat @ b.mat - b.mat @ a.mat)


def anticommutator(a: LinOp, b: LinOp) -> LinOp:
    a._same_space(b)
    return LinOp(a.space, a.mat @ b.mat + b.mat @ a.mat)


def opnorm(a: LinOp) -> float:
    """Operator (spectral) norm.  Uses eigvalsh on certified hermitian input."""
    if a.dim == 0 or a.mat.size == 0:
        return 0.0
    if a.hermitian:
        w = np.linalg.eigvalsh(a.mat)
        return float(np.max(np.abs(w)))
    return float(np.linalg.svd(a.mat, compute_uv=False)[0])


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenvalues with multiplicities.

    ``values`` is strictly increasing; ``multiplicities`` are positive ints
    summing to ``source_dim``.  ``meta`` records how the spectrum was obtained.
    """

    values: np.ndarray
    multiplicities: np.ndarray
    source_dim: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        m = np.asarray(self.multiplicities, dtype=np.int64)
        if v.ndim != 1 or m.shape != v.shape:
            raise ContractViolation("values/multiplicities must be matching 1-d arrays")
        if v.size and np.any(np.diff(v) <= 0):
            raise ContractViolation("Spectrum values must be strictly increasing")
        if np.any(m < 1):
            raise ContractViolation("multiplicities must be >= 1")
        if int(m.sum()) != self.source_dim:
            raise ContractViolation(
                f"multiplicities sum {int(m.sum())} != source dim {self.source_dim}")
        v.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "multiplicities", m)

    def expand(self) -> np.ndarray:
        """Eigenvalues repeated by multiplicity, ascending."""
        return np.repeat(self.values, self.multiplicities)

    @property
    def count(self) -> int:
        return int(self.multiplicities.sum())


def merge_close(values: np.ndarray, tol: float = EIG_MERGE_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Cluster an ascending float array by gaps > tol; return (means, counts)."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        return v.copy(), np.zeros(0, dtype=np.int64)
    breaks = np.flatnonzero(np.diff(v) > tol)
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks + 1, [v.size]))
    means = np.array([v[s:e].mean() for s, e in zip(starts, ends)])
    counts = (ends - starts).astype(np.int64)
    return means, counts


def eig_hermitian(a: LinOp, merge_tol: float = EIG_MERGE_TOL) -> Spectrum:
    """Full spectrum of a certified hermitian operator, merged at ``merge_tol``."""
    if not a.hermitian:
        raise ContractViolation("eig_hermitian requires a certified hermitian LinOp")
    if a.dim > _DENSE_CAP:
        raise ResourceLimit(
            f"dense eigensolve at dim {a.dim} exceeds cap {_DENSE_CAP}")
    w = np.linalg.eigvalsh(a.mat)
    vals, mult = merge_close(w, merge_tol)
    return Spectrum(vals, mult, a.dim, meta={"method": "eigvalsh", "merge_tol": merge_tol})


def block(grid: Sequence[Sequence[LinOp | None]],
          parts: Sequence[BasisSpace] | None = None) -> LinOp:
    """Assemble a square block operator on ``DirectSum(parts)``.

    ``grid[i][j]`` couples summand j into summand i; ``None`` means zero.
    Every present block must live on a single space equal to both the row and
    the column part (blocks only connect identical summands).  ``parts`` is
    inferred from the grid when omitted; rows/columns that are entirely
    ``None`` make inference fail, so pass ``parts`` explicitly in that case.
    """
    n = len(grid)
    if n == 0 or any(len(row) != n for row in grid):
        raise ContractViolation("grid must be square and non-empty")
    if parts is None:
        inferred: list[BasisSpace | None] = [None] * n
        for i in range(n):
            for j in range(n):
                g = grid[i][j]
                if g is not None:
                    if inferred[i] is None:
                        inferred[i] = g.space
                    if inferred[j] is None:
                        inferred[j] = g.space
        if any(p is None for p in inferred):
            raise ContractViolation(
                "cannot infer all block spaces from grid; pass parts explicitly")
        parts = [p for p in inferred if p is not None]
    parts = tuple(parts)
    if len(parts) != n:
        raise ContractViolation(f"expected {n} parts, got {len(parts)}")
    for i in range(n):
        for j in range(n):
            g = grid[i][j]
            if g is None:
                continue
            if g.space != parts[i] or g.space != parts[j]:
                raise SpaceMismatch(
                    f"block ({i},{j}) on {g.space} does not match parts "
                    f"{parts[i]} / {parts[j]}")
    space = DirectSum(parts)
    offs = space.offsets()
    out = np.zeros((space.dim, space.dim), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            g = grid[i][j]
            if g is not None:
                out[offs[i]:offs[i] + parts[i].dim,
                    offs[j]:offs[j] + parts[j].dim] = g.mat
    return LinOp(space, out, hermitian=_is_hermitian(out))


def direct_sum(ops: Sequence[LinOp]) -> LinOp:
    """Block-diagonal sum of operators (possibly on different spaces)."""
    parts = tuple(op.space for op in ops)
    space = DirectSum(parts)
    out = np.zeros((space.dim, space.dim), dtype=np.complex128)
    offs = space.offsets()
    for off, op in zip(offs, ops):
        out[off:off + op.dim, off:off + op.dim] = op.mat
    return LinOp(space, out, hermitian=all(op.hermitian for op in ops))
