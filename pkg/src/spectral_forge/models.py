"""Truncated spectral-triple and extension models.

Base triples: the circle (windowed two-sided ladder with Dirac = position +
shift), the two-point space, and the one-point space.  Extension models pair a
circle quotient with a fiber triple through the Toeplitz projection P (onto
nonnegative ladder indices) and carry their algebra elements in split form

    e  =  x  +  P a P (x) I_fiber,

where ``x`` is supported on the compact corner (range of P) tensored with the
fiber and ``a`` is the truncated image of e in the quotient circle algebra.
The Laurent coefficients of the quotient image are tracked exactly through
sums, products and adjoints; circle point states evaluate through them.

Concrete extensions: the q-deformed 3-sphere over the circle, the equatorial
q-deformed 2-sphere over the two-point space, and a generic builder for
testing (any circle quotient against any fiber).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .linop import (
    BasisSpace,
    ContractViolation,
    HalfLine,
    Line,
    LinOp,
    Product,
    Qubit,
    ResourceLimit,
    Spectrum,
    SpaceMismatch,
    diagonal_op,
    eig_hermitian,
    from_matrix,
    get_dense_cap,
    identity,
    opnorm,
    tensor,
)

__all__ = [
    "TripleModel",
    "KronTerms",
    "SplitElement",
    "ExtensionModel",
    "circle_triple",
    "two_point_triple",
    "point_triple",
    "toeplitz_extension",
    "suq2_model",
    "podles_model",
    "check_toeplitz_conditions",
    "ToeplitzReport",
    "interior_mask",
    "hermitian_basis",
    "ideal_hermitian_basis",
    "DESCRIPTOR_DEFAULTS",
    "build_from_descriptor",
]

RELATION_TOL = 1e-12


# ---------------------------------------------------------------------------
# base triples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TripleModel:
    """A truncated spectral triple: generators, Dirac, and its spectrum.

    ``projection`` is the Toeplitz projection (indicator of nonnegative
    ladder indices) when the space supports one, else None.  ``symbols`` maps
    generator names to exact Laurent coefficients of their quotient-circle
    image, when the triple is a circle.
    """

    name: str
    space: BasisSpace
    dirac: LinOp
    generators: dict[str, LinOp]
    dirac_eigs: Spectrum
    smooth_set: tuple[str, ...]
    projection: LinOp | None = None
    symbols: dict[str, dict[int, complex]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.dirac.hermitian:
            raise ContractViolation("triple Dirac must be certified hermitian")


def _shift_up(dim: int) -> np.ndarray:
    """Hard-truncated raising shift: e_i -> e_{i+1}, top basis vector -> 0."""
    m = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(dim - 1):
        m[i + 1, i] = 1.0
    return m


def circle_triple(window: int, shift: float = 0.5) -> TripleModel:
    """Circle model on the symmetric window: Dirac diag(n + shift).

    Generators are the truncated raising/lowering shifts; the raising shift
    has quotient symbol z (Laurent degree +1).
    """
    if window < 1:
        raise ContractViolation(f"circle window must be >= 1, got {window}")
    space = Line(window)
    dirac = diagonal_op(space, lambda n: n + shift)
    up = from_matrix(space, _shift_up(space.dim))
    down = up.adjoint()
    proj = diagonal_op(space, lambda n: 1.0 if n >= 0 else 0.0)
    return TripleModel(
        name="circle",
        space=space,
        dirac=dirac,
        generators={"shift_up": up, "shift_down": down},
        dirac_eigs=eig_hermitian(dirac),
        smooth_set=("shift_up", "shift_down"),
        projection=proj,
        symbols={"shift_up": {1: 1.0}, "shift_down": {-1: 1.0}},
    )


def two_point_triple() -> TripleModel:
    """Two points: H = C^2, Dirac = off-diagonal flip, generators the two
    coordinate projections."""
    space = Qubit()
    dirac = from_matrix(space, np.array([[0, 1], [1, 0]], dtype=np.complex128))
    p1 = diagonal_op(space, [1.0, 0.0])
    p2 = diagonal_op(space, [0.0, 1.0])
    return TripleModel(
        name="two_point",
        space=space,
        dirac=dirac,
        generators={"proj_first": p1, "proj_second": p2},
        dirac_eigs=eig_hermitian(dirac),
        smooth_set=("proj_first", "proj_second"),
    )


def point_triple() -> TripleModel:
    """One point: H = C, Dirac = 0."""
    space = HalfLine(1)
    dirac = diagonal_op(space, [0.0])
    return TripleModel(
        name="point",
        space=space,
        dirac=dirac,
        generators={"one": identity(space)},
        dirac_eigs=eig_hermitian(dirac),
        smooth_set=("one",),
    )


# ---------------------------------------------------------------------------
# factored operators on a product space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KronTerms:
    """Operator on Product(left_space, right_space) stored as sum_i X_i (x) Y_i.

    Keeps quantum-sphere computations (relation defects, commutator pieces)
    out of the dense product space: Frobenius norms and algebra work directly
    on the factor matrices.
    """

    left_space: BasisSpace
    right_space: BasisSpace
    terms: tuple[tuple[np.ndarray, np.ndarray], ...]

    @staticmethod
    def zero(left_space: BasisSpace, right_space: BasisSpace) -> "KronTerms":
        return KronTerms(left_space, right_space, ())

    @staticmethod
    def of(left_space: BasisSpace, right_space: BasisSpace,
           left: np.ndarray, right: np.ndarray) -> "KronTerms":
        lm = np.asarray(left, dtype=np.complex128)
        rm = np.asarray(right, dtype=np.complex128)
        if lm.shape != (left_space.dim,) * 2 or rm.shape != (right_space.dim,) * 2:
            raise ContractViolation("factor shapes do not match the factor spaces")
        return KronTerms(left_space, right_space, ((lm, rm),))

    def _same_frame(self, other: "KronTerms"):
        if (self.left_space, self.right_space) != (other.left_space, other.right_space):
            raise SpaceMismatch("KronTerms factor spaces differ")

    def __add__(self, other: "KronTerms") -> "KronTerms":
        self._same_frame(other)
        return KronTerms(self.left_space, self.right_space, self.terms + other.terms)

    def __neg__(self) -> "KronTerms":
        return KronTerms(self.left_space, self.right_space,
                         tuple((-x, y) for x, y in self.terms))

    def __sub__(self, other: "KronTerms") -> "KronTerms":
        return self + (-other)

    def __mul__(self, c: complex) -> "KronTerms":
        return KronTerms(self.left_space, self.right_space,
                         tuple((complex(c) * x, y) for x, y in self.terms))

    __rmul__ = __mul__

    def __matmul__(self, other: "KronTerms") -> "KronTerms":
        self._same_frame(other)
        prods = tuple((x1 @ x2, y1 @ y2)
                      for x1, y1 in self.terms for x2, y2 in other.terms)
        return KronTerms(self.left_space, self.right_space, prods)

    def adjoint(self) -> "KronTerms":
        return KronTerms(self.left_space, self.right_space,
                         tuple((x.conj().T, y.conj().T) for x, y in self.terms))

    def simplify(self) -> "KronTerms":
        """Merge terms sharing a byte-identical right factor."""
        groups: list[tuple[bytes, np.ndarray, np.ndarray]] = []
        for x, y in self.terms:
            key = y.tobytes()
            for i, (k, xs, ys) in enumerate(groups):
                if k == key:
                    groups[i] = (k, xs + x, ys)
                    break
            else:
                groups.append((key, x.copy(), y))
        kept = tuple((x, y) for _, x, y in groups if np.any(x))
        return KronTerms(self.left_space, self.right_space, kept)

    def masked(self, left_mask: np.ndarray, right_mask: np.ndarray) -> "KronTerms":
        """Compress by diagonal 0/1 masks on each factor (interior projection)."""
        lm = np.asarray(left_mask, dtype=np.float64)
        rm = np.asarray(right_mask, dtype=np.float64)
        out = tuple((lm[:, None] * x * lm[None, :], rm[:, None] * y * rm[None, :])
                    for x, y in self.terms)
        return KronTerms(self.left_space, self.right_space, out)

    def frobenius(self) -> float:
        """Frobenius norm computed factor-wise; an upper bound on the operator
        norm, exact for the norm-squared identity on Kronecker sums."""
        if not self.terms:
            return 0.0
        n = len(self.terms)
        gl = np.empty((n, n), dtype=np.complex128)
        gr = np.empty((n, n), dtype=np.complex128)
        for i, (xi, yi) in enumerate(self.terms):
            for j, (xj, yj) in enumerate(self.terms):
                gl[i, j] = np.vdot(xi, xj)
                gr[i, j] = np.vdot(yi, yj)
        val = float(np.real(np.sum(gl * gr)))
        return np.sqrt(max(val, 0.0))

    @property
    def product_space(self) -> Product:
        return Product(self.left_space, self.right_space)

    def to_linop(self) -> LinOp:
        dim = self.left_space.dim * self.right_space.dim
        if dim > get_dense_cap():
            raise ResourceLimit(
                f"dense expansion at dim {dim} exceeds cap {get_dense_cap()}")
        out = np.zeros((dim, dim), dtype=np.complex128)
        for x, y in self.terms:
            out += np.kron(x, y)
        return from_matrix(self.product_space, out)

    def opnorm_dense(self) -> float:
        return opnorm(self.to_linop())


# ---------------------------------------------------------------------------
# split elements
# ---------------------------------------------------------------------------


def _symbol_tuple(sym: dict[int, complex]) -> tuple[tuple[int, complex], ...]:
    items = [(int(n), complex(c)) for n, c in sym.items() if c != 0]
    return tuple(sorted(items))


@dataclass(frozen=True)
class SplitElement:
    """e = x + P a P (x) I on an extension model.

    ``ideal`` is x as KronTerms supported on the compact corner; ``quotient``
    is the truncated matrix of a on the quotient space; ``symbol`` holds the
    exact Laurent coefficients of the quotient image (independent of the
    truncation).
    """

    ext: "ExtensionModel"
    ideal: KronTerms
    quotient: np.ndarray = field(repr=False)
    symbol: tuple[tuple[int, complex], ...] = ()

    def __post_init__(self):
        qm = np.asarray(self.quotient, dtype=np.complex128)
        d = self.ext.quotient.space.dim
        if qm.shape != (d, d):
            raise ContractViolation("quotient matrix shape mismatch")
        object.__setattr__(self, "quotient", qm)

    def _same_ext(self, other: "SplitElement"):
        if self.ext is not other.ext:
            raise SpaceMismatch("split elements belong to different extension models")

    @property
    def symbol_dict(self) -> dict[int, complex]:
        return dict(self.symbol)

    def __add__(self, other: "SplitElement") -> "SplitElement":
        self._same_ext(other)
        sym = self.symbol_dict
        for n, c in other.symbol:
            sym[n] = sym.get(n, 0.0) + c
        return SplitElement(self.ext, self.ideal + other.ideal,
                            self.quotient + other.quotient, _symbol_tuple(sym))

    def __sub__(self, other: "SplitElement") -> "SplitElement":
        return self + (-1.0) * other

    def __mul__(self, c: complex) -> "SplitElement":
        c = complex(c)
        return SplitElement(self.ext, c * self.ideal, c * self.quotient,
                            _symbol_tuple({n: c * v for n, v in self.symbol}))

    __rmul__ = __mul__

    def __matmul__(self, other: "SplitElement") -> "SplitElement":
        """Split product: the corner correction P a1 P a2 P - P a1 a2 P is
        absorbed into the ideal part, so representing the product equals the
        product of the representations entrywise."""
        self._same_ext(other)
        ext = self.ext
        pm = ext.projection.mat
        ib = np.eye(ext.fiber.space.dim, dtype=np.complex128)
        a1, a2 = self.quotient, other.quotient
        pa1p = pm @ a1 @ pm
        pa2p = pm @ a2 @ pm
        corner = pa1p @ pa2p - pm @ (a1 @ a2) @ pm
        hs, fs = ext.quotient.space, ext.fiber.space
        x = (self.ideal @ other.ideal
             + self.ideal @ KronTerms.of(hs, fs, pa2p, ib)
             + KronTerms.of(hs, fs, pa1p, ib) @ other.ideal
             + KronTerms.of(hs, fs, corner, ib)).simplify()
        sym: dict[int, complex] = {}
        for n1, c1 in self.symbol:
            for n2, c2 in other.symbol:
                sym[n1 + n2] = sym.get(n1 + n2, 0.0) + c1 * c2
        return SplitElement(ext, x, a1 @ a2, _symbol_tuple(sym))

    def adjoint(self) -> "SplitElement":
        return SplitElement(self.ext, self.ideal.adjoint(), self.quotient.conj().T,
                            _symbol_tuple({-n: np.conj(c) for n, c in self.symbol}))

    def hermitian_part(self) -> "SplitElement":
        return 0.5 * (self + self.adjoint())

    def skew_part(self) -> "SplitElement":
        """(e - e†)/2i — the Hermitian element carrying the skew directions."""
        return (-0.5j) * (self - self.adjoint())

    def is_zero(self, tol: float = 0.0) -> bool:
        qnorm = float(np.max(np.abs(self.quotient))) if self.quotient.size else 0.0
        return qnorm <= tol and self.ideal.frobenius() <= max(tol, 0.0) * 10 + tol


# ---------------------------------------------------------------------------
# extension models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtensionModel:
    """Quotient circle + fiber triple + Toeplitz projection, with generators
    in split form and the model's defining relation defects."""

    name: str
    quotient: TripleModel
    fiber: TripleModel
    projection: LinOp
    lambda_shift: float
    q: float | None = None
    degree_cap: int = 3
    fourier_cap: int = 16
    generators: dict[str, SplitElement] = field(default_factory=dict)
    relation_defects: dict[str, KronTerms] = field(default_factory=dict)
    pi_images: dict[str, KronTerms] = field(default_factory=dict)

    def __post_init__(self):
        pm = self.projection.mat
        if float(np.max(np.abs(pm @ pm - pm))) > 1e-12:
            raise ContractViolation("Toeplitz projection is not idempotent")
        if not self.projection.hermitian:
            raise ContractViolation("Toeplitz projection must be hermitian")
        da = self.quotient.dirac.mat
        if float(np.max(np.abs(pm @ da - da @ pm))) != 0.0:
            raise ContractViolation("projection must commute with the quotient Dirac exactly")

    # -- spaces ---------------------------------------------------------------

    @property
    def product_space(self) -> Product:
        return Product(self.quotient.space, self.fiber.space)

    @property
    def corner_rank(self) -> int:
        return int(round(float(np.real(np.trace(self.projection.mat)))))

    # -- element constructors -------------------------------------------------

    def zero_element(self) -> SplitElement:
        hs, fs = self.quotient.space, self.fiber.space
        return SplitElement(self, KronTerms.zero(hs, fs),
                            np.zeros((hs.dim, hs.dim), dtype=np.complex128), ())

    def unit(self) -> SplitElement:
        """The unit of the extension: quotient part I, whose image is P (x) I."""
        hs = self.quotient.space
        return SplitElement(self, KronTerms.zero(hs, self.fiber.space),
                            np.eye(hs.dim, dtype=np.complex128), ((0, 1.0 + 0j),))

    def from_quotient_symbol(self, sym: dict[int, complex]) -> SplitElement:
        """Element P f(z) P (x) I for a Laurent polynomial f (x = 0 split part)."""
        hs = self.quotient.space
        up = self.quotient.generators["shift_up"].mat
        down = self.quotient.generators["shift_down"].mat
        a = np.zeros((hs.dim, hs.dim), dtype=np.complex128)
        for n, c in sym.items():
            if c == 0:
                continue
            power = np.linalg.matrix_power(up if n >= 0 else down, abs(int(n)))
            a = a + complex(c) * power
        return SplitElement(self, KronTerms.zero(hs, self.fiber.space), a,
                            _symbol_tuple(sym))

    def from_ideal(self, x: KronTerms) -> SplitElement:
        hs = self.quotient.space
        return SplitElement(self, x, np.zeros((hs.dim, hs.dim), dtype=np.complex128), ())

    # -- representations -------------------------------------------------------

    def pi_factored(self, e: SplitElement) -> KronTerms:
        """pi(e) = x + (PaP)(x)I as factored terms."""
        pm = self.projection.mat
        ib = np.eye(self.fiber.space.dim, dtype=np.complex128)
        term = KronTerms.of(self.quotient.space, self.fiber.space,
                            pm @ e.quotient @ pm, ib)
        return (e.ideal + term).simplify()

    def rep_pi(self, e: SplitElement) -> LinOp:
        return self.pi_factored(e).to_linop()

    def rep_pi_sigma(self, e: SplitElement) -> LinOp:
        """pi_sigma(e) = a (x) I — the quotient image acting on the full space."""
        a = from_matrix(self.quotient.space, e.quotient)
        return tensor(a, identity(self.fiber.space))

    # -- interior masks and relation residuals ---------------------------------

    def corner_mask(self, margin: int) -> np.ndarray:
        """Interior of the embedded compact corner: nonnegative ladder indices
        with ``margin`` indices dropped at the top (the bottom end is exact by
        construction)."""
        n = self.corner_rank
        labels = np.array(self.quotient.space.labels())
        return (labels >= 0) & (labels <= (n - 1) - margin)

    def relation_residuals(self, margin: int = 1, method: str = "auto") -> dict[str, float]:
        """Norms of the defining-relation defects on the interior subspace.

        method 'dense' = operator norm of the compressed dense defect;
        'frobenius' = factored Frobenius norm (an upper bound, usable at any
        size); 'auto' picks dense when it fits the configured cap.
        """
        mask_a = self.corner_mask(margin).astype(np.float64)
        mask_b = interior_mask(self.fiber.space, margin).astype(np.float64)
        out: dict[str, float] = {}
        for name, defect in self.relation_defects.items():
            d = defect.masked(mask_a, mask_b).simplify()
            use_dense = method == "dense" or (
                method == "auto" and self.product_space.dim <= get_dense_cap())
            if method not in ("auto", "dense", "frobenius"):
                raise ContractViolation(f"unknown residual method {method!r}")
            out[name] = d.opnorm_dense() if use_dense else d.frobenius()
        return out


def interior_mask(space: BasisSpace, margin: int) -> np.ndarray:
    """Boolean mask of interior basis labels: symmetric windows lose ``margin``
    indices at both ends, one-sided ladders only at the top, C^2 has no
    boundary."""
    if margin < 0:
        raise ContractViolation("margin must be >= 0")
    if isinstance(space, Line):
        labels = np.array(space.labels())
        return np.abs(labels) <= space.window - margin
    if isinstance(space, HalfLine):
        labels = np.array(space.labels())
        return labels <= space.n - 1 - margin
    if isinstance(space, Qubit):
        return np.ones(2, dtype=bool)
    raise ContractViolation(f"no interior convention for {space}")


# ---------------------------------------------------------------------------
# concrete extensions
# ---------------------------------------------------------------------------


def _half_diag(space: Line, values) -> np.ndarray:
    """Diagonal matrix supported on nonnegative labels with value values(k)."""
    d = np.zeros(space.dim, dtype=np.complex128)
    for i, lab in enumerate(space.labels()):
        if lab >= 0:
            d[i] = values(lab)
    return np.diag(d)


def suq2_model(q: float, cutoff: int, window: int, shift: float = 0.5) -> ExtensionModel:
    """q-deformed 3-sphere as an extension of the circle by compacts (x) circle.

    Quotient: circle on the symmetric window of half-width cutoff-1 (so the
    Toeplitz projection has rank = cutoff); fiber: circle of half-width
    ``window`` with unshifted Dirac.  Ideal-side generator images:

        alpha = (lowering shift) * sqrt(1 - q^(2k))   on the corner,
        beta  = diag(q^k) (x) (fiber lowering shift),

    with quotient images z^-1 and 0.  All five defining relations are exposed
    as defect operators; they vanish on the interior (hard-cutoff edges only).
    """
    if not 0.0 < q < 1.0:
        raise ContractViolation(f"deformation parameter must be in (0,1), got {q}")
    if cutoff < 2 or window < 2:
        raise ContractViolation("cutoff and window must be >= 2")
    quotient = circle_triple(cutoff - 1, shift)
    fiber = circle_triple(window, 0.0)
    hs, fs = quotient.space, fiber.space
    assert quotient.projection is not None
    proj = quotient.projection

    down = quotient.generators["shift_down"].mat
    alpha_left = _half_diag(hs, lambda k: np.sqrt(1.0 - q ** (2 * k)))
    e_alpha = down @ alpha_left                       # e_k -> sqrt(1-q^2k) e_{k-1}
    e_nq = _half_diag(hs, lambda k: q ** k)
    ib = np.eye(fs.dim, dtype=np.complex128)
    fiber_down = fiber.generators["shift_down"].mat

    pi_alpha = KronTerms.of(hs, fs, e_alpha, ib)
    pi_beta = KronTerms.of(hs, fs, e_nq, fiber_down)
    unit = KronTerms.of(hs, fs, proj.mat, ib)

    defects = {
        "commute_ab": (pi_alpha @ pi_beta - q * (pi_beta @ pi_alpha)).simplify(),
        "commute_ab_star": (pi_alpha @ pi_beta.adjoint()
                            - q * (pi_beta.adjoint() @ pi_alpha)).simplify(),
        "normal_b": (pi_beta.adjoint() @ pi_beta
                     - pi_beta @ pi_beta.adjoint()).simplify(),
        "sphere_unit_left": (pi_alpha.adjoint() @ pi_alpha
                             + pi_beta.adjoint() @ pi_beta - unit).simplify(),
        "sphere_unit_right": (pi_alpha @ pi_alpha.adjoint()
                              + (q * q) * (pi_beta @ pi_beta.adjoint())
                              - unit).simplify(),
    }

    ext = ExtensionModel(
        name="suq2", quotient=quotient, fiber=fiber, projection=proj,
        lambda_shift=shift, q=q,
        pi_images={"alpha": pi_alpha, "beta": pi_beta},
        relation_defects=defects,
    )
    a_alpha = down
    pap = proj.mat @ a_alpha @ proj.mat
    x_alpha = KronTerms.of(hs, fs, e_alpha - pap, ib)
    ext.generators["alpha"] = SplitElement(ext, x_alpha, a_alpha, ((-1, 1.0 + 0j),))
    ext.generators["beta"] = ext.from_ideal(pi_beta)
    return ext


def podles_model(q: float, cutoff: int, shift: float = 0.5) -> ExtensionModel:
    """Equatorial q-deformed 2-sphere as an extension of the circle by
    compacts (x) C^2.

    Corner generator images use the corrected weights

        alpha = sqrt(1 - q^(4k+4)) raising shift (x) I_2,
        beta  = diag(q^(2k+2)) (x) diag(1,-1),

    under which the quadratic relations hold exactly on the whole corner
    (including the bottom basis vector) and the commutation relation holds
    with constant q^2 — the square of the deformation parameter.  Quotient
    images: alpha -> z (raising), beta -> 0.
    """
    if not 0.0 < q < 1.0:
        raise ContractViolation(f"deformation parameter must be in (0,1), got {q}")
    if cutoff < 2:
        raise ContractViolation("cutoff must be >= 2")
    quotient = circle_triple(cutoff - 1, shift)
    fiber = two_point_triple()
    hs, fs = quotient.space, fiber.space
    assert quotient.projection is not None
    proj = quotient.projection

    up = quotient.generators["shift_up"].mat
    alpha_weight = _half_diag(hs, lambda k: np.sqrt(1.0 - q ** (4 * k + 4)))
    e_alpha = up @ alpha_weight                     # e_k -> sqrt(1-q^(4k+4)) e_{k+1}
    e_beta = _half_diag(hs, lambda k: q ** (2 * k + 2))
    i2 = np.eye(2, dtype=np.complex128)
    z2 = np.diag([1.0, -1.0]).astype(np.complex128)

    pi_alpha = KronTerms.of(hs, fs, e_alpha, i2)
    pi_beta = KronTerms.of(hs, fs, e_beta, z2)
    unit = KronTerms.of(hs, fs, proj.mat, i2)
    q2, q4 = q * q, q ** 4

    defects = {
        "hermitian_b": (pi_beta.adjoint() - pi_beta).simplify(),
        "commute_ba": (pi_beta @ pi_alpha - q2 * (pi_alpha @ pi_beta)).simplify(),
        "sphere_unit_left": (pi_alpha.adjoint() @ pi_alpha
                             + pi_beta @ pi_beta - unit).simplify(),
        "sphere_unit_right": (q4 * (pi_alpha @ pi_alpha.adjoint())
                              + pi_beta @ pi_beta - q4 * unit).simplify(),
    }

    ext = ExtensionModel(
        name="podles", quotient=quotient, fiber=fiber, projection=proj,
        lambda_shift=shift, q=q,
        pi_images={"alpha": pi_alpha, "beta": pi_beta},
        relation_defects=defects,
    )
    pap = proj.mat @ up @ proj.mat
    x_alpha = KronTerms.of(hs, fs, e_alpha - pap, i2)
    ext.generators["alpha"] = SplitElement(ext, x_alpha, up, ((1, 1.0 + 0j),))
    ext.generators["beta"] = ext.from_ideal(pi_beta)
    return ext


def toeplitz_extension(quotient: TripleModel, fiber: TripleModel,
                       name: str | None = None) -> ExtensionModel:
    """Generic extension of a circle quotient by compacts (x) fiber.

    Generators: the quotient raising/lowering images plus rank-one corner
    elements tensored with the fiber unit and fiber generators — enough to
    exercise both representation legs without model-specific relations.
    """
    if quotient.projection is None:
        raise ContractViolation("quotient triple must carry a Toeplitz projection")
    ext = ExtensionModel(
        name=name or f"{quotient.name}_x_{fiber.name}",
        quotient=quotient, fiber=fiber, projection=quotient.projection,
        lambda_shift=float(np.real(quotient.dirac.mat[
            quotient.space.index_of(0), quotient.space.index_of(0)]))
        if isinstance(quotient.space, Line) else 0.0,
    )
    hs, fs = quotient.space, fiber.space
    ext.generators["quotient_shift_up"] = ext.from_quotient_symbol({1: 1.0})
    ext.generators["quotient_shift_down"] = ext.from_quotient_symbol({-1: 1.0})
    corner = np.zeros((hs.dim, hs.dim), dtype=np.complex128)
    corner[hs.index_of(0), hs.index_of(0)] = 1.0
    ib = np.eye(fs.dim, dtype=np.complex128)
    ext.generators["corner"] = ext.from_ideal(KronTerms.of(hs, fs, corner, ib))
    for gname, gop in fiber.generators.items():
        ext.generators[f"corner_{gname}"] = ext.from_ideal(
            KronTerms.of(hs, fs, corner, gop.mat))
    return ext


# ---------------------------------------------------------------------------
# smoothness / Toeplitz-type report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ToeplitzReport:
    """Per-generator P-regularity diagnostics for the quotient triple."""

    generator_rows: dict[str, dict[str, float]]
    proj_idempotent_defect: float
    proj_dirac_commutator: float
    passed: bool

    def to_payload(self) -> dict:
        return {
            "generators": self.generator_rows,
            "proj_idempotent_defect": self.proj_idempotent_defect,
            "proj_dirac_commutator": self.proj_dirac_commutator,
            "passed": self.passed,
        }


def check_toeplitz_conditions(ext: ExtensionModel,
                              sv_profile_len: int = 8) -> ToeplitzReport:
    """Report the compactness/boundedness data behind the Toeplitz-type
    conditions for each quotient generator: norm and singular-value profile
    of [P, a], the compressed-Dirac commutator norms, and exactness of the
    identity [D, a] = [PD, a] + [(1-P)D, a] (trivial at truncation, reported
    for completeness)."""
    pm = ext.projection.mat
    da = ext.quotient.dirac.mat
    dp = pm @ da
    dq = da - dp
    signed = (2.0 * pm - np.eye(pm.shape[0])) @ da
    rows: dict[str, dict[str, float]] = {}
    ok = True
    for name, gop in ext.quotient.generators.items():
        a = gop.mat
        comm_p = pm @ a - a @ pm
        sv = np.linalg.svd(comm_p, compute_uv=False)
        rank = int(np.sum(sv > 1e-12))
        ident_defect = float(np.max(np.abs(
            (da @ a - a @ da) - (dp @ a - a @ dp) - (dq @ a - a @ dq))))
        row = {
            "norm_comm_proj": float(sv[0]) if sv.size else 0.0,
            "rank_comm_proj": float(rank),
            "norm_comm_dirac_pos": float(np.linalg.svd(dp @ a - a @ dp,
                                                       compute_uv=False)[0]),
            "norm_comm_dirac_neg": float(np.linalg.svd(dq @ a - a @ dq,
                                                       compute_uv=False)[0]),
            "norm_comm_signed_dirac": float(np.linalg.svd(signed @ a - a @ signed,
                                                          compute_uv=False)[0]),
            "split_identity_defect": ident_defect,
        }
        for i in range(min(sv_profile_len, sv.size)):
            row[f"sv{i}"] = float(sv[i])
        rows[name] = row
        ok = ok and ident_defect <= 1e-12 and np.isfinite(list(row.values())).all()
    p_defect = float(np.max(np.abs(pm @ pm - pm)))
    pd_comm = float(np.max(np.abs(pm @ da - da @ pm)))
    ok = ok and p_defect <= 1e-12 and pd_comm == 0.0
    return ToeplitzReport(rows, p_defect, pd_comm, bool(ok))


# ---------------------------------------------------------------------------
# hermitian spanning sets for sampling and optimization
# ---------------------------------------------------------------------------


def _words(letters: list[str], max_len: int) -> Iterable[tuple[str, ...]]:
    frontier: list[tuple[str, ...]] = [()]
    for _ in range(max_len):
        frontier = [w + (ell,) for w in frontier for ell in letters]
        yield from frontier


def _monomial(ext: ExtensionModel, word: tuple[str, ...]) -> SplitElement:
    e = ext.unit()
    for letter in word:
        if letter.endswith("*"):
            g = ext.generators[letter[:-1]].adjoint()
        else:
            g = ext.generators[letter]
        e = e @ g
    return e


def hermitian_basis(ext: ExtensionModel, degree_cap: int | None = None,
                    fourier_cap: int | None = None) -> list[tuple[str, SplitElement]]:
    """Hermitian elements spanning the truncated generator algebra over the
    reals: the unit, cosine/sine images of circle Fourier modes, and the
    (skew-)hermitian parts of generator monomials up to the degree cap.

    Fourier modes above the quotient window truncate to operators that no
    longer determine their own symbols (far enough out, to zero), so the
    ladder stops at the window regardless of the requested cap."""
    d = ext.degree_cap if degree_cap is None else degree_cap
    kmax = ext.fourier_cap if fourier_cap is None else fourier_cap
    kmax = min(kmax, ext.quotient.space.window)
    out: list[tuple[str, SplitElement]] = [("unit", ext.unit())]
    for k in range(1, kmax + 1):
        zk = ext.from_quotient_symbol({k: 1.0})
        out.append((f"cos:{k}", zk.hermitian_part()))
        out.append((f"sin:{k}", zk.skew_part()))
    letters: list[str] = []
    for gname, g in ext.generators.items():
        if gname.startswith("quotient_"):
            continue  # circle directions are covered by the Fourier images
        letters.append(gname)
        adj_is_self = (g.adjoint() - g).is_zero(1e-14)
        if not adj_is_self:
            letters.append(gname + "*")
    seen: set[tuple[str, ...]] = set()
    for word in _words(letters, d):
        mirror = tuple(
            (ell[:-1] if ell.endswith("*") else ell + "*") for ell in reversed(word))
        if mirror in seen:
            continue
        seen.add(word)
        m = _monomial(ext, word)
        label = "*".join(word)
        h, s = m.hermitian_part(), m.skew_part()
        if not h.is_zero(1e-14):
            out.append((f"re:{label}", h))
        if not s.is_zero(1e-14):
            out.append((f"im:{label}", s))
    return out


def ideal_hermitian_basis(ext: ExtensionModel,
                          degree_cap: int | None = None) -> list[tuple[str, SplitElement]]:
    """Hermitian elements of the compact-corner ideal: (skew-)hermitian parts
    of the ideal components of generator monomials."""
    d = ext.degree_cap if degree_cap is None else degree_cap
    letters: list[str] = []
    for gname, g in ext.generators.items():
        if gname.startswith("quotient_"):
            continue
        letters.append(gname)
        if not (g.adjoint() - g).is_zero(1e-14):
            letters.append(gname + "*")
    out: list[tuple[str, SplitElement]] = []
    seen: set[tuple[str, ...]] = set()
    for word in _words(letters, d):
        mirror = tuple(
            (ell[:-1] if ell.endswith("*") else ell + "*") for ell in reversed(word))
        if mirror in seen:
            continue
        seen.add(word)
        x = ext.from_ideal(_monomial(ext, word).ideal)
        label = "*".join(word)
        h, s = x.hermitian_part(), x.skew_part()
        if not h.is_zero(1e-14):
            out.append((f"re:{label}", h))
        if not s.is_zero(1e-14):
            out.append((f"im:{label}", s))
    if not out:
        raise ContractViolation("model has no ideal-side directions to sample")
    return out


# ---------------------------------------------------------------------------
# descriptors
# ---------------------------------------------------------------------------

DESCRIPTOR_DEFAULTS: dict = {
    "q": 0.5,
    "N": 64,
    "W": 64,
    "lambda": 0.5,
    "degree_cap": 3,
}


def build_from_descriptor(desc: dict) -> TripleModel | ExtensionModel:
    """Build a model from the JSON descriptor {model, q, N, W, lambda,
    degree_cap}; unspecified fields take the documented defaults."""
    d = dict(DESCRIPTOR_DEFAULTS)
    d.update({k: v for k, v in desc.items() if v is not None})
    kind = d.get("model")
    if kind == "circle":
        return circle_triple(int(d["W"]), float(d["lambda"]))
    if kind == "two_point":
        return two_point_triple()
    if kind == "suq2":
        ext = suq2_model(float(d["q"]), int(d["N"]), int(d["W"]), float(d["lambda"]))
    elif kind == "podles":
        ext = podles_model(float(d["q"]), int(d["N"]), float(d["lambda"]))
    else:
        raise ContractViolation(f"unknown model kind {kind!r}")
    object.__setattr__(ext, "degree_cap", int(d["degree_cap"]))
    return ext
