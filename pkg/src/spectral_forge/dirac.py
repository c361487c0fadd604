"""Dirac operators and representations for extension bundles.

The bundle Hilbert space is three copies of (quotient (x) fiber) (x) C^2,
realized as nested direct sums with the spinor slot outermost:

    base block:      D1 = [[ DA(x)1, 1(x)DB ], [ 1(x)DB, -DA(x)1 ]],
    interface block: DI = [[ 0, D2 - i D3 ], [ D2 + i D3, 0 ]],

with D2 = [[Dq(x)1, Dp(x)1], [Dp(x)1, -Dq(x)1]] and D3 = diag(1(x)DB, 1(x)DB),
where Dp = P DA (the compressed nonnegative part) and Dq = DA - Dp.  The
representation pairs the quotient leg with the base block and mixes both legs
on the interface block.

Commutators with represented elements reduce to closed-form blocks; those are
the fast path, and the direct dense commutators are kept for cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linop import (
    ContractViolation,
    DirectSum,
    LinOp,
    Product,
    ResourceLimit,
    block,
    commutator,
    direct_sum,
    from_matrix,
    get_dense_cap,
    identity,
    opnorm,
    tensor,
)
from .models import ExtensionModel, SplitElement, TripleModel, point_triple

__all__ = [
    "DiracBundle",
    "build_bundle",
    "Represented",
    "represent",
    "CommutatorBlocks",
    "commutator_blocks",
    "commutator_direct",
    "check_p_injectivity",
    "PInjectivityReport",
    "split_compact_case",
]


@dataclass(frozen=True)
class DiracBundle:
    """Assembled Dirac data for one extension model."""

    ext: ExtensionModel
    space_ab: Product
    space_spinor: DirectSum        # (quotient x fiber) (x) C^2 as 2 blocks
    space_total: DirectSum         # base block (+) interface block
    delta_a: LinOp                 # quotient Dirac on its own space
    delta_b: LinOp                 # fiber Dirac on its own space
    delta_p: LinOp                 # P DA (compressed nonnegative part)
    delta_q: LinOp                 # DA - Dp
    d1: LinOp
    d2: LinOp
    d3: LinOp
    di: LinOp
    d: LinOp


def build_bundle(ext: ExtensionModel) -> DiracBundle:
    """Assemble D1, D2, D3, DI and the full Dirac for an extension model.

    Dense construction: refuses when the total space (six product copies)
    exceeds the dense cap — large models go through the factored paths in the
    analysis module instead.
    """
    hs, fs = ext.quotient.space, ext.fiber.space
    ab = Product(hs, fs)
    if 6 * ab.dim > get_dense_cap():
        raise ResourceLimit(
            f"bundle needs dense dimension {6 * ab.dim} > cap {get_dense_cap()}; "
            "use the factored analysis paths for large models")
    da, db = ext.quotient.dirac, ext.fiber.dirac
    pm = ext.projection.mat
    dp = from_matrix(hs, pm @ da.mat)
    dq = from_matrix(hs, da.mat - pm @ da.mat)

    ia, ib = identity(hs), identity(fs)
    da_1 = tensor(da, ib)
    one_db = tensor(ia, db)
    dp_1 = tensor(dp, ib)
    dq_1 = tensor(dq, ib)

    d1 = block([[da_1, one_db], [one_db, -1.0 * da_1]])
    d2 = block([[dq_1, dp_1], [dp_1, -1.0 * dq_1]])
    d3 = block([[one_db, None], [None, one_db]])
    spinor = DirectSum((ab, ab))
    di = block([[None, d2 - 1j * d3], [d2 + 1j * d3, None]],
               parts=(spinor, spinor))
    d = direct_sum([d1, di])
    return DiracBundle(
        ext=ext, space_ab=ab, space_spinor=spinor, space_total=d.space,
        delta_a=da, delta_b=db, delta_p=dp, delta_q=dq,
        d1=d1, d2=d2, d3=d3, di=di, d=d,
    )


@dataclass(frozen=True)
class Represented:
    """The three representation legs of one element: the base pair
    (quotient image on both spinor components), the interface pair (full
    image first, quotient image second), and their direct sum alongside the
    doubled interface pair matching the full Dirac."""

    pi1: LinOp      # pi_sigma (+) pi_sigma        on the base block
    pi2: LinOp      # pi (+) pi_sigma              on the interface half
    pi2_pair: LinOp  # pi2 (+) pi2                  on the interface block
    pi_full: LinOp  # pi1 (+) pi2_pair             on the total space


def represent(bundle: DiracBundle, e: SplitElement) -> Represented:
    ext = bundle.ext
    pi_e = ext.rep_pi(e)
    pis_e = ext.rep_pi_sigma(e)
    pi1 = direct_sum([pis_e, pis_e])
    pi2 = direct_sum([pi_e, pis_e])
    pi2_pair = direct_sum([pi2, pi2])
    return Represented(pi1, pi2, pi2_pair, direct_sum([pi1, pi2_pair]))


@dataclass(frozen=True)
class CommutatorBlocks:
    """Closed-form commutator blocks for one element.

    base_block is [DA, a] on the quotient space — the base commutator is
    diag([DA,a](x)1, -[DA,a](x)1), so its norm equals the block's.  c_plus
    and c_minus are [D2 +- i D3, pi2(e)] on the spinor space; the interface
    commutator is antidiag(c_minus, c_plus), with norm max of the two.
    """

    base_block: LinOp
    c_plus: LinOp
    c_minus: LinOp

    def norm_base(self) -> float:
        return opnorm(self.base_block)

    def norm_interface(self) -> float:
        return max(opnorm(self.c_plus), opnorm(self.c_minus))

    def seminorm(self) -> float:
        return max(self.norm_base(), self.norm_interface())


def commutator_blocks(bundle: DiracBundle, e: SplitElement) -> CommutatorBlocks:
    """Assemble the exact commutator blocks from the split data.

    With x the ideal part and a the quotient image:
      [D2 -+ i D3, pi2(e)] =
        [[ -+ i [1(x)DB, x],  P[Dp,a]P(x)1 - x (Dp(x)1) ],
         [ [Dp,a]P(x)1 + (Dp(x)1) x,  -[Dq,a](x)1 ]].
    (The corner of [Dp,a] is taken against the compact side on each leg.)
    """
    ext = bundle.ext
    hs, fs = ext.quotient.space, ext.fiber.space
    pm = ext.projection.mat
    a = e.quotient
    dpm = bundle.delta_p.mat
    dqm = bundle.delta_q.mat
    dbm = bundle.delta_b.mat
    ib = np.eye(fs.dim, dtype=np.complex128)

    base = from_matrix(hs, bundle.delta_a.mat @ a - a @ bundle.delta_a.mat)

    x = e.ideal.simplify()
    comm_p = dpm @ a - a @ dpm
    top_right_terms = [(pm @ comm_p, ib)] + [(-(xm @ dpm), ym) for xm, ym in x.terms]
    bot_left_terms = [(comm_p @ pm, ib)] + [((dpm @ xm), ym) for xm, ym in x.terms]
    comm_db_terms = [(xm, dbm @ ym - ym @ dbm) for xm, ym in x.terms]

    def dense(terms) -> LinOp:
        out = np.zeros((hs.dim * fs.dim,) * 2, dtype=np.complex128)
        for xm, ym in terms:
            out += np.kron(xm, ym)
        return from_matrix(Product(hs, fs), out)

    comm_db = dense(comm_db_terms)
    top_right = dense(top_right_terms)
    bot_left = dense(bot_left_terms)
    bot_right = -1.0 * dense([(dqm @ a - a @ dqm, ib)])

    c_minus = block([[-1j * comm_db, top_right], [bot_left, bot_right]])
    c_plus = block([[1j * comm_db, top_right], [bot_left, bot_right]])
    return CommutatorBlocks(base_block=base, c_plus=c_plus, c_minus=c_minus)


def commutator_direct(bundle: DiracBundle, e: SplitElement,
                      which: str = "d1") -> LinOp:
    """Dense commutator of the requested Dirac block with the represented
    element — the independent slow path used to validate the block formulas."""
    r = represent(bundle, e)
    if which == "d1":
        return commutator(bundle.d1, r.pi1)
    if which == "di":
        return commutator(bundle.di, r.pi2_pair)
    if which == "d":
        return commutator(bundle.d, r.pi_full)
    raise ContractViolation(f"unknown commutator selector {which!r}")


@dataclass(frozen=True)
class PInjectivityReport:
    """Invertibility of the compressed Dirac on the corner subspace."""

    min_singular: float
    inverse_norm: float
    passed: bool

    def to_payload(self) -> dict:
        return {"min_singular": self.min_singular,
                "inverse_norm": self.inverse_norm, "passed": self.passed}


def check_p_injectivity(ext: ExtensionModel, tol: float = 1e-10) -> PInjectivityReport:
    """Check ker(P DA) and the corner is trivial: smallest singular value of
    the corner compression of the quotient Dirac must be positive."""
    pm = ext.projection.mat
    da = ext.quotient.dirac.mat
    idx = np.where(np.real(np.diag(pm)) > 0.5)[0]
    if idx.size == 0:
        raise ContractViolation("Toeplitz projection has rank zero")
    corner = (pm @ da @ pm)[np.ix_(idx, idx)]
    sv = np.linalg.svd(corner, compute_uv=False)
    smin = float(sv[-1])
    passed = smin > tol
    inv = float(1.0 / smin) if passed else float("inf")
    return PInjectivityReport(min_singular=smin, inverse_norm=inv, passed=passed)


def split_compact_case(ext: ExtensionModel) -> DiracBundle:
    """Independent assembly of the compact-fiber degenerate case: fiber Dirac
    identically zero, so D3 vanishes, the base block is diag(DA, -DA) per
    product copy, and the interface couples through D2 alone.  Built directly
    from the general shapes (not by calling build_bundle) so the two can be
    compared entrywise."""
    fs = ext.fiber.space
    db = ext.fiber.dirac
    if float(np.max(np.abs(db.mat))) != 0.0:
        raise ContractViolation("compact case requires an identically zero fiber Dirac")
    hs = ext.quotient.space
    ab = Product(hs, fs)
    if 6 * ab.dim > get_dense_cap():
        raise ResourceLimit("compact-case assembly exceeds the dense cap")
    da = ext.quotient.dirac
    pm = ext.projection.mat
    dp = from_matrix(hs, pm @ da.mat)
    dq = from_matrix(hs, da.mat - pm @ da.mat)
    ib = identity(fs)
    da_1 = tensor(da, ib)
    dp_1 = tensor(dp, ib)
    dq_1 = tensor(dq, ib)
    zero_ab = from_matrix(ab, np.zeros((ab.dim, ab.dim), dtype=np.complex128))

    d1 = block([[da_1, zero_ab], [zero_ab, -1.0 * da_1]])
    d2 = block([[dq_1, dp_1], [dp_1, -1.0 * dq_1]])
    d3 = block([[zero_ab, None], [None, zero_ab]])
    spinor = DirectSum((ab, ab))
    di = block([[None, d2], [d2, None]], parts=(spinor, spinor))
    d = direct_sum([d1, di])
    return DiracBundle(
        ext=ext, space_ab=ab, space_spinor=spinor, space_total=d.space,
        delta_a=da, delta_b=db, delta_p=dp, delta_q=dq,
        d1=d1, d2=d2, d3=d3, di=di, d=d,
    )
