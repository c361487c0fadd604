"""State-distance machinery: Hermitian direction sets, the Dirac seminorm as
a function of coefficients, and the constrained maximization that evaluates
the induced metric between states.

The solver certifies from below: every reported value is g.c / L(c) for an
explicitly constructed coefficient vector c (the witness), with L the exact
block seminorm — smoothing and line search only steer the iterates, they
never touch the reported number.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize

from .dirac import DiracBundle, commutator_blocks
from .linop import ContractViolation, LinOp, Qubit, commutator, opnorm
from .models import ExtensionModel, SplitElement, TripleModel, hermitian_basis

__all__ = [
    "CirclePoint",
    "QubitPoint",
    "VectorState",
    "Direction",
    "default_basis",
    "evaluate_state",
    "seminorm_L",
    "SeminormProgram",
    "seminorm_program",
    "SolverOptions",
    "DistanceResult",
    "connes_distance",
    "diameter_estimate",
    "q_sweep",
    "QSweepRow",
    "QSweepTable",
]


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CirclePoint:
    """Point evaluation on the circle (through the quotient symbol for
    extension elements)."""

    theta: float


@dataclass(frozen=True)
class QubitPoint:
    """One of the two points of the two-point space (labels 1 and 2)."""

    index: int

    def __post_init__(self):
        if self.index not in (1, 2):
            raise ContractViolation("two-point states are labelled 1 and 2")


@dataclass(frozen=True)
class VectorState:
    """Vector state <v, . v> in the chosen representation leg."""

    vec: np.ndarray
    leg: str = "pi"  # "pi" (full image) or "pi_sigma" (quotient image)


@dataclass(frozen=True)
class Direction:
    """A named Hermitian direction: an operator (plain triples) or a split
    element (extensions), with its circle symbol when known."""

    name: str
    op: LinOp | None = None
    element: SplitElement | None = None
    symbol: tuple[tuple[int, complex], ...] | None = None


def default_basis(context: TripleModel | DiracBundle, fourier_cap: int = 16,
                  degree_cap: int | None = None) -> list[Direction]:
    """Hermitian directions for distance problems: Fourier modes on the
    circle, the coordinate projections on two points, and the generator
    span on extensions.  Fourier ladders stop at the window of the circle
    carrying them; higher modes truncate to operators that no longer
    determine their own symbols."""
    if isinstance(context, DiracBundle):
        ext = context.ext
        out = []
        for name, h in hermitian_basis(ext, degree_cap=degree_cap,
                                       fourier_cap=fourier_cap):
            out.append(Direction(name=name, element=h, symbol=h.symbol))
        return out
    triple = context
    if isinstance(triple.space, Qubit):
        return [Direction(name=name, op=op)
                for name, op in triple.generators.items()]
    if "shift_up" not in triple.generators:
        raise ContractViolation(
            f"no default direction set for triple {triple.name!r}")
    up = triple.generators["shift_up"].mat
    down = triple.generators["shift_down"].mat
    out = [Direction(name="unit",
                     op=LinOp(triple.space, np.eye(triple.space.dim,
                                                   dtype=np.complex128),
                              hermitian=True),
                     symbol=((0, 1.0 + 0j),))]
    for k in range(1, min(fourier_cap, triple.space.window) + 1):
        zk = np.linalg.matrix_power(up, k)
        zmk = np.linalg.matrix_power(down, k)
        cos_m = 0.5 * (zk + zmk)
        sin_m = -0.5j * (zk - zmk)
        out.append(Direction(name=f"cos:{k}",
                             op=LinOp(triple.space, cos_m, hermitian=True),
                             symbol=((-k, 0.5 + 0j), (k, 0.5 + 0j))))
        out.append(Direction(name=f"sin:{k}",
                             op=LinOp(triple.space, sin_m, hermitian=True),
                             symbol=((-k, 0.5j), (k, -0.5j))))
    return out


def evaluate_state(context: TripleModel | DiracBundle, state,
                   direction: Direction) -> float:
    """Value of a state on a Hermitian direction (must come out real)."""
    if isinstance(state, CirclePoint):
        sym = direction.symbol
        if sym is None and direction.element is not None:
            sym = direction.element.symbol
        if sym is None:
            raise ContractViolation(
                f"direction {direction.name!r} has no circle symbol")
        val = complex(sum(c * np.exp(1j * n * state.theta) for n, c in sym))
    elif isinstance(state, QubitPoint):
        if direction.op is None or not isinstance(direction.op.space, Qubit):
            raise ContractViolation("two-point states need two-point operators")
        val = direction.op.entry(state.index, state.index)
    elif isinstance(state, VectorState):
        v = np.asarray(state.vec, dtype=np.complex128)
        if direction.element is not None:
            ext = context.ext if isinstance(context, DiracBundle) else context
            rep = (ext.rep_pi(direction.element) if state.leg == "pi"
                   else ext.rep_pi_sigma(direction.element))
            mat = rep.mat
        elif direction.op is not None:
            mat = direction.op.mat
        else:
            raise ContractViolation("direction carries no operator")
        nrm = float(np.real(np.vdot(v, v)))
        if nrm <= 0:
            raise ContractViolation("vector state needs a nonzero vector")
        val = complex(np.vdot(v, mat @ v) / nrm)
    else:
        raise ContractViolation(f"unknown state kind {type(state).__name__}")
    if abs(val.imag) > 1e-9 * (1.0 + abs(val.real)):
        raise ContractViolation(
            f"state value on {direction.name!r} is not real: {val}")
    return float(val.real)


def seminorm_L(context: TripleModel | DiracBundle, element) -> float:
    """The Dirac seminorm of one element: max of the base and interface
    commutator norms on a bundle, the plain commutator norm on a triple."""
    if isinstance(context, DiracBundle):
        if not isinstance(element, SplitElement):
            raise ContractViolation("bundle seminorm expects a split element")
        return commutator_blocks(context, element).seminorm()
    if isinstance(element, Direction):
        element = element.op
    if not isinstance(element, LinOp):
        raise ContractViolation("triple seminorm expects an operator")
    return opnorm(commutator(context.dirac, element))


# ---------------------------------------------------------------------------
# the seminorm as a function of coefficients
# ---------------------------------------------------------------------------


class SeminormProgram:
    """L(c) = max over block families of || sum_i c_i M_{f,i} ||, with exact,
    subgradient, and smoothed evaluations sharing the same stacked data."""

    def __init__(self, families: list[list[np.ndarray]], names: list[str]):
        if not families or any(len(f) != len(families[0]) for f in families):
            raise ContractViolation("families must be nonempty and aligned")
        self.names = names
        self.n_coeffs = len(families[0])
        # commutator families are mostly banded, so each family is kept as a
        # sparse (n_coeffs x dim^2) matrix: assembly and gradient projection
        # both become O(nnz) instead of O(n_coeffs * dim^2).  A family of
        # anti-Hermitian matrices (every [D,h] with both factors Hermitian)
        # is stored as i*M so an eigendecomposition replaces the full SVD.
        self._flats: list[sp.csr_matrix] = []
        self._herm: list[bool] = []
        self._shapes: list[tuple[int, int]] = []
        for fam in families:
            anti = all(
                float(np.max(np.abs(m + m.conj().T))) <= 1e-12 if m.size
                else True for m in fam)
            rows = [(1j * m if anti else m).reshape(-1) for m in fam]
            self._flats.append(sp.csr_matrix(np.stack(rows)))
            self._herm.append(anti)
            self._shapes.append(fam[0].shape)

    def _assemble(self, c: np.ndarray) -> list[tuple[np.ndarray, bool]]:
        c = np.asarray(c, dtype=np.float64)
        if c.shape != (self.n_coeffs,):
            raise ContractViolation("coefficient vector has the wrong length")
        return [((flat.T @ c).reshape(shape), herm)
                for flat, herm, shape in zip(self._flats, self._herm,
                                             self._shapes)]

    def _project(self, k: int, g_mat: np.ndarray) -> np.ndarray:
        """Gradients of c -> Re tr(G^dag M_f(c)) for the stored family."""
        return np.real(self._flats[k] @ g_mat.conj().reshape(-1))

    def null_directions(self) -> np.ndarray:
        """Mask of coefficient directions annihilated by every family.

        Row i of a family flat is the vectorized commutator of direction i,
        so an empty row in all families means L vanishes on that direction
        exactly, not merely below some tolerance.
        """
        dead = np.ones(self.n_coeffs, dtype=bool)
        for flat in self._flats:
            weight = np.asarray(np.abs(flat).sum(axis=1)).ravel()
            dead &= weight == 0.0
        return dead

    def value(self, c: np.ndarray) -> float:
        best = 0.0
        for m, herm in self._assemble(c):
            if herm:
                w = np.linalg.eigvalsh(m)
                top = max(abs(float(w[0])), abs(float(w[-1]))) if w.size else 0.0
            else:
                top = float(np.linalg.svd(m, compute_uv=False)[0])
            best = max(best, top)
        return best

    def value_and_subgrad(self, c: np.ndarray) -> tuple[float, np.ndarray]:
        decomps = []
        for m, herm in self._assemble(c):
            if herm:
                w, u = np.linalg.eigh(m)
                j = int(np.argmax(np.abs(w)))
                decomps.append((abs(float(w[j])), ("eig", w[j], u[:, j])))
            else:
                u, s, vh = np.linalg.svd(m)
                decomps.append((float(s[0]), ("svd", u[:, 0], vh[0, :].conj())))
        tops = [d[0] for d in decomps]
        k = int(np.argmax(tops))
        kind = decomps[k][1]
        if kind[0] == "eig":
            _, lam, u0 = kind
            grad = np.sign(lam) * self._project(k, np.outer(u0, u0.conj()))
        else:
            _, u0, v0 = kind
            grad = self._project(k, np.outer(u0, v0.conj()))
        return tops[k], grad

    def smooth_value_and_grad(self, c: np.ndarray,
                              eta: float) -> tuple[float, np.ndarray]:
        """Soft maximum over all singular values of all families:
        eta * log sum_j 2 cosh(sigma_j / eta), evaluated in shifted form."""
        parts = []
        m_hat = 0.0
        for m, herm in self._assemble(c):
            if herm:
                w, u = np.linalg.eigh(m)
                parts.append(("eig", w, u, None))
                m_hat = max(m_hat, float(np.max(np.abs(w))) if w.size else 0.0)
            else:
                u, sig, vh = np.linalg.svd(m)
                parts.append(("svd", sig, u, vh))
                m_hat = max(m_hat, float(sig[0]) if sig.size else 0.0)
        total = 0.0
        weights = []
        for _, vals, _, _ in parts:
            ep = np.exp((vals - m_hat) / eta)
            en = np.exp((-vals - m_hat) / eta)
            weights.append((ep, en))
            total += float(np.sum(ep + en))
        value = m_hat + eta * np.log(total)
        grad = np.zeros(self.n_coeffs)
        for k, ((kind, _, u, vh), (ep, en)) in enumerate(zip(parts, weights)):
            w = (ep - en) / total
            g_mat = (u * w) @ (u.conj().T if kind == "eig" else vh)
            grad += self._project(k, g_mat)
        return float(value), grad


def seminorm_program(context: TripleModel | DiracBundle,
                     basis: list[Direction]) -> SeminormProgram:
    names = [d.name for d in basis]
    if isinstance(context, DiracBundle):
        fam_base: list[np.ndarray] = []
        fam_iface: list[np.ndarray] = []
        for d in basis:
            if d.element is None:
                raise ContractViolation(
                    f"direction {d.name!r} is not a split element")
            blocks = commutator_blocks(context, d.element)
            fam_base.append(blocks.base_block.mat)
            fam_iface.append(blocks.c_plus.mat)
        return SeminormProgram([fam_base, fam_iface], names)
    fam = []
    dm = context.dirac.mat
    for d in basis:
        if d.op is None:
            raise ContractViolation(f"direction {d.name!r} is not an operator")
        fam.append(dm @ d.op.mat - d.op.mat @ dm)
    return SeminormProgram([fam], names)


# ---------------------------------------------------------------------------
# distance solver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolverOptions:
    max_iter: int = 20000
    restarts: int = 4
    rel_tol: float = 1e-8
    stall_window: int = 50
    warmup_cap: int = 150          # per-restart cap on subgradient steps
    eta_schedule: tuple[float, ...] = (0.3, 0.1, 0.03, 0.01, 0.003)
    polish: bool = True
    threads: int = 1


@dataclass(frozen=True)
class DistanceResult:
    value: float
    witness: np.ndarray
    seminorm_at_witness: float
    iterations: int
    converged: bool
    gap_estimate: float
    meta: dict = field(default_factory=dict)

    def to_payload(self) -> dict:
        return {"value": self.value,
                "witness": [float(w) for w in self.witness],
                "seminorm_at_witness": self.seminorm_at_witness,
                "iterations": self.iterations, "converged": self.converged,
                "gap_estimate": self.gap_estimate, "meta": self.meta}


def _certified(program: SeminormProgram, g: np.ndarray,
               c: np.ndarray) -> float:
    ell = program.value(c)
    if ell <= 1e-300:
        return 0.0
    return float(g @ c) / ell


def _phase1(program: SeminormProgram, g: np.ndarray,
            opts: SolverOptions) -> tuple[np.ndarray, float, int, bool]:
    k = g.size
    idx = np.arange(1, k + 1, dtype=np.float64)
    cands = [g, g / idx, g / np.sqrt(idx), np.sign(g)]
    best_c, best_v = g.copy(), -np.inf
    total_iters = 0
    stalled = False
    budget = max(opts.max_iter // max(opts.restarts, 1), 1)
    if opts.polish:
        # the annealed polish does the fine work; the subgradient pass only
        # has to supply a feasible warm start
        budget = min(budget, max(opts.warmup_cap, 1))
    for c0 in cands[:opts.restarts]:
        ell0 = program.value(c0)
        if ell0 <= 1e-14:
            continue
        c = c0 / ell0
        history: list[float] = []
        for t in range(budget):
            total_iters += 1
            ell, grad = program.value_and_subgrad(c)
            if ell > 1e-300:
                c = c / ell
            val = float(g @ c)
            if val > best_v:
                best_v, best_c = val, c.copy()
            history.append(best_v)
            if len(history) > opts.stall_window:
                old = history[-opts.stall_window - 1]
                if abs(best_v - old) <= opts.rel_tol * max(abs(best_v), 1e-300):
                    stalled = True
                    break
            ss = float(grad @ grad)
            d = g - (float(g @ grad) / ss) * grad if ss > 0 else g.copy()
            nd = float(np.linalg.norm(d))
            if nd <= 1e-15:
                stalled = True
                break
            step = 0.5 * max(abs(val), 1e-6) / (nd * np.sqrt(1.0 + t))
            c = c + step * d
    return best_c, best_v, total_iters, stalled


def _phase2(program: SeminormProgram, g: np.ndarray, c_start: np.ndarray,
            opts: SolverOptions) -> tuple[np.ndarray, float, int, float]:
    best_c = c_start.copy()
    best_v = _certified(program, g, best_c)
    evals = 0
    stage_values = [best_v]

    def objective(c, eta):
        nonlocal evals
        evals += 1
        margin = float(g @ c)
        if margin <= 1e-12:
            # finite penalty with a restoring slope: an infinite value with a
            # zero gradient would abort the line search outright
            return 1e6 - 10.0 * margin, -10.0 * g
        sval, sgrad = program.smooth_value_and_grad(c, eta)
        return sval - np.log(margin), sgrad - g / margin

    c = best_c.copy()
    for eta in opts.eta_schedule:
        res = minimize(lambda cc: objective(cc, eta), c, jac=True,
                       method="L-BFGS-B",
                       options={"maxiter": 400, "ftol": 1e-14, "gtol": 1e-12})
        c = res.x
        v = _certified(program, g, c)
        if v > best_v:
            best_v, best_c = v, c.copy()
        stage_values.append(best_v)
    if len(stage_values) >= 2 and best_v > 0:
        gap = abs(stage_values[-1] - stage_values[-2]) / best_v
    else:
        gap = 0.0
    return best_c, best_v, evals, gap


def connes_distance(context: TripleModel | DiracBundle, state_a, state_b,
                    basis: list[Direction] | None = None,
                    options: SolverOptions | None = None) -> DistanceResult:
    """Supremum of |omega_a(e) - omega_b(e)| over Hermitian e with Dirac
    seminorm at most one, maximized over the given direction span.

    The reported value is always certified: it equals the pairing of the
    states with the returned witness, whose exact seminorm is at most
    1 + 1e-9.
    """
    opts = options or SolverOptions()
    basis = basis if basis is not None else default_basis(context)
    program = seminorm_program(context, basis)
    g = np.array([evaluate_state(context, state_a, d)
                  - evaluate_state(context, state_b, d) for d in basis])
    # a direction with zero seminorm but a nonzero state gap makes the
    # supremum infinite: the span and the state pairing disagree about what
    # the element is (symbol states on over-truncated modes do exactly this)
    separating_null = program.null_directions() & (g != 0.0)
    if np.any(separating_null):
        names = ", ".join(basis[i].name for i in np.nonzero(separating_null)[0])
        raise ContractViolation(
            f"distance span contains seminorm-null directions that still "
            f"separate the states ({names}); the supremum is unbounded")
    if float(np.max(np.abs(g))) == 0.0:
        zero = np.zeros(len(basis))
        return DistanceResult(value=0.0, witness=zero, seminorm_at_witness=0.0,
                              iterations=0, converged=True, gap_estimate=0.0,
                              meta={"reason": "identical states on this span"})
    c1, v1, iters, stalled = _phase1(program, g, opts)
    if opts.polish:
        c2, v2, evals, gap = _phase2(program, g, c1, opts)
    else:
        c2, v2, evals, gap = c1, _certified(program, g, c1), 0, np.inf
    # certification: rescale the witness to exact feasibility
    ell = program.value(c2)
    if ell <= 1e-300:
        raise ContractViolation("optimizer collapsed onto the seminorm kernel")
    witness = c2 / ell
    ell2 = program.value(witness)
    if ell2 > 1.0 + 1e-9:
        witness = witness * ((1.0 + 0.5e-9) / ell2)
        ell2 = program.value(witness)
    value = float(g @ witness)
    converged = bool(stalled if not opts.polish else gap <= 1e-6)
    return DistanceResult(
        value=value, witness=witness, seminorm_at_witness=float(ell2),
        iterations=iters + evals, converged=converged,
        gap_estimate=float(gap if opts.polish else np.inf),
        meta={"phase1_value": v1, "phase2_value": v2,
              "phase1_stalled": stalled, "basis_size": len(basis)})


def diameter_estimate(context, states: list, basis: list[Direction] | None = None,
                      options: SolverOptions | None = None) -> tuple[float, list]:
    """Max pairwise distance over a finite state family; returns the value
    and the full pair table."""
    basis = basis if basis is not None else default_basis(context)
    rows = []
    best = 0.0
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            r = connes_distance(context, states[i], states[j], basis, options)
            rows.append((i, j, r))
            best = max(best, r.value)
    return best, rows


# ---------------------------------------------------------------------------
# deformation sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QSweepRow:
    q: float
    pair_id: str
    distance: float
    seminorm_at_witness: float
    iterations: int
    converged: bool
    error: str = ""


@dataclass(frozen=True)
class QSweepTable:
    family: str
    rows: tuple[QSweepRow, ...]

    def to_payload(self) -> dict:
        return {"family": self.family,
                "rows": [{"q": r.q, "pair_id": r.pair_id, "distance": r.distance,
                          "seminorm_at_witness": r.seminorm_at_witness,
                          "iterations": r.iterations, "converged": r.converged,
                          "error": r.error} for r in self.rows]}


def q_sweep(build_context, q_values, pairs: list[tuple[str, object, object]],
            options: SolverOptions | None = None,
            fourier_cap: int = 16, degree_cap: int | None = None) -> QSweepTable:
    """Distances across a deformation-parameter grid.  ``build_context`` maps
    q to a solver context; per-point failures are recorded in their row (NaN
    distance, converged False) and the sweep continues."""
    rows: list[QSweepRow] = []
    family = ""
    for q in q_values:
        try:
            context = build_context(float(q))
            if isinstance(context, DiracBundle):
                family = context.ext.name
            basis = default_basis(context, fourier_cap=fourier_cap,
                                  degree_cap=degree_cap)
            for pair_id, sa, sb in pairs:
                try:
                    r = connes_distance(context, sa, sb, basis, options)
                    rows.append(QSweepRow(q=float(q), pair_id=pair_id,
                                          distance=r.value,
                                          seminorm_at_witness=r.seminorm_at_witness,
                                          iterations=r.iterations,
                                          converged=r.converged))
                except Exception as exc:  # noqa: BLE001 - sweep must survive
                    rows.append(QSweepRow(q=float(q), pair_id=pair_id,
                                          distance=float("nan"),
                                          seminorm_at_witness=float("nan"),
                                          iterations=0, converged=False,
                                          error=f"{type(exc).__name__}: {exc}"))
        except Exception as exc:  # noqa: BLE001
            for pair_id, _, _ in pairs:
                rows.append(QSweepRow(q=float(q), pair_id=pair_id,
                                      distance=float("nan"),
                                      seminorm_at_witness=float("nan"),
                                      iterations=0, converged=False,
                                      error=f"{type(exc).__name__}: {exc}"))
    return QSweepTable(family=family, rows=tuple(rows))
