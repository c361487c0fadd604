import numpy as np
import pytest

from spectral_forge.dirac import (
    build_bundle,
    check_p_injectivity,
    commutator_blocks,
    commutator_direct,
    represent,
    split_compact_case,
)
from spectral_forge.linop import (
    ContractViolation,
    Line,
    ResourceLimit,
    diagonal_op,
    get_dense_cap,
    opnorm,
    set_dense_cap,
)
from spectral_forge.models import (
    ExtensionModel,
    circle_triple,
    point_triple,
    suq2_model,
    toeplitz_extension,
    two_point_triple,
)

from conftest import assert_close


@pytest.fixture(scope="module")
def compact_bundle():
    ext = toeplitz_extension(circle_triple(4, 0.5), point_triple())
    return build_bundle(ext)


@pytest.fixture(scope="module")
def generic_bundle(circle_two_point):
    return build_bundle(circle_two_point)


def _sample_elements(ext):
    """A spread of split elements: generators, products, Fourier modes, and
    hermitian/skew parts — enough to hit every block of the formulas."""
    gens = list(ext.generators.values())
    z = ext.from_quotient_symbol({1: 1.0, -2: 0.5})
    out = [ext.unit(), z, gens[0], gens[0].adjoint()]
    if len(gens) > 1:
        prod = gens[0] @ gens[1]
        out += [gens[1], prod, prod.hermitian_part(), (z @ gens[0]).skew_part()]
    return out


# ---------------------------------------------------------------------------
# bundle assembly
# ---------------------------------------------------------------------------


def test_bundle_shapes_and_hermiticity(suq2_bundle):
    b = suq2_bundle
    n = b.space_ab.dim
    assert b.space_ab.dim == b.ext.quotient.space.dim * b.ext.fiber.space.dim
    assert b.d1.space.dim == 2 * n
    assert b.di.space.dim == 4 * n
    assert b.d.space.dim == 6 * n
    for op in (b.d1, b.d2, b.d3, b.di, b.d):
        assert op.hermitian


def test_bundle_decomposition(suq2_bundle):
    b = suq2_bundle
    n = b.space_ab.dim
    # the full Dirac is the base block stacked above the interface block
    assert_close(b.d.mat[:2 * n, :2 * n], b.d1.mat, 0.0)
    assert_close(b.d.mat[2 * n:, 2 * n:], b.di.mat, 0.0)
    assert_close(b.d.mat[:2 * n, 2 * n:], 0.0, 0.0)
    # DI couples the two spinor halves off-diagonally
    assert_close(b.di.mat[:2 * n, :2 * n], 0.0, 0.0)
    assert_close(b.di.mat[:2 * n, 2 * n:], b.d2.mat - 1j * b.d3.mat, 0.0)


def test_bundle_spectra_are_symmetric(podles_bundle):
    for op in (podles_bundle.d1, podles_bundle.di):
        ev = np.linalg.eigvalsh(op.mat)
        assert_close(np.sort(ev), np.sort(-ev), 1e-10,
                     "Dirac block spectrum not symmetric about zero")


def test_full_spectrum_is_union_of_blocks(podles_bundle):
    b = podles_bundle
    merged = np.sort(np.concatenate([np.linalg.eigvalsh(b.d1.mat),
                                     np.linalg.eigvalsh(b.di.mat)]))
    assert_close(np.linalg.eigvalsh(b.d.mat), merged, 1e-10)


def test_bundle_respects_dense_cap():
    ext = suq2_model(0.5, 8, 8, 0.5)
    old = get_dense_cap()
    set_dense_cap(100)
    try:
        with pytest.raises(ResourceLimit):
            build_bundle(ext)
    finally:
        set_dense_cap(old)


# ---------------------------------------------------------------------------
# representation legs
# ---------------------------------------------------------------------------


def test_represent_legs(suq2_bundle):
    b = suq2_bundle
    ext = b.ext
    e = ext.generators["alpha"]
    r = represent(b, e)
    n = b.space_ab.dim
    pi = ext.rep_pi(e).mat
    pis = ext.rep_pi_sigma(e).mat
    assert_close(r.pi1.mat[:n, :n], pis, 0.0)
    assert_close(r.pi1.mat[n:, n:], pis, 0.0)
    assert_close(r.pi2.mat[:n, :n], pi, 0.0)
    assert_close(r.pi2.mat[n:, n:], pis, 0.0)
    assert r.pi2_pair.space.dim == 4 * n
    assert r.pi_full.space.dim == 6 * n


def test_ideal_elements_vanish_on_base_leg(suq2_bundle):
    beta = suq2_bundle.ext.generators["beta"]
    r = represent(suq2_bundle, beta)
    assert r.pi1.is_zero()
    assert not r.pi2.is_zero()


# ---------------------------------------------------------------------------
# closed-form commutator blocks against the dense oracle
# ---------------------------------------------------------------------------


def _assert_blocks_match(bundle, e, tol):
    cb = commutator_blocks(bundle, e)
    ab = bundle.space_ab.dim
    ib = np.eye(bundle.ext.fiber.space.dim)

    d1_direct = commutator_direct(bundle, e, "d1").mat
    base_ab = np.kron(cb.base_block.mat, ib)
    expected_d1 = np.zeros_like(d1_direct)
    expected_d1[:ab, :ab] = base_ab
    expected_d1[ab:, ab:] = -base_ab
    assert_close(d1_direct, expected_d1, tol, "base block formula")

    di_direct = commutator_direct(bundle, e, "di").mat
    expected_di = np.zeros_like(di_direct)
    expected_di[:2 * ab, 2 * ab:] = cb.c_minus.mat
    expected_di[2 * ab:, :2 * ab] = cb.c_plus.mat
    assert_close(di_direct, expected_di, tol, "interface block formula")

    assert abs(cb.norm_base() - opnorm(commutator_direct(bundle, e, "d1"))) <= tol
    assert abs(cb.norm_interface() - opnorm(commutator_direct(bundle, e, "di"))) <= tol


@pytest.mark.parametrize("fixture_name", [
    "suq2_bundle", "podles_bundle", "generic_bundle", "compact_bundle"])
def test_commutator_blocks_match_dense(fixture_name, request):
    bundle = request.getfixturevalue(fixture_name)
    for e in _sample_elements(bundle.ext):
        _assert_blocks_match(bundle, e, 1e-12)


def test_full_commutator_stacks_blocks(podles_bundle):
    e = podles_bundle.ext.generators["alpha"].hermitian_part()
    full = commutator_direct(podles_bundle, e, "d")
    n = 2 * podles_bundle.space_ab.dim
    assert_close(full.mat[:n, :n], commutator_direct(podles_bundle, e, "d1").mat, 0.0)
    assert_close(full.mat[n:, n:], commutator_direct(podles_bundle, e, "di").mat, 0.0)
    cb = commutator_blocks(podles_bundle, e)
    assert abs(cb.seminorm() - opnorm(full)) <= 1e-12


def test_interface_blocks_are_adjoint_pair_for_hermitian_elements(suq2_bundle,
                                                                  podles_bundle):
    for bundle in (suq2_bundle, podles_bundle):
        ext = bundle.ext
        for e in [ext.generators["alpha"].hermitian_part(),
                  ext.generators["alpha"].skew_part(),
                  ext.generators["beta"].hermitian_part(),
                  (ext.generators["alpha"] @ ext.generators["beta"]).hermitian_part()]:
            cb = commutator_blocks(bundle, e)
            assert_close(cb.c_minus.mat, -cb.c_plus.mat.conj().T, 1e-13,
                         "interface pair must be skew-adjoint for hermitian e")


def test_unit_has_zero_seminorm(suq2_bundle):
    # pi(1) = P (x) I sits exactly where all the Dirac couplings are already
    # compressed, so even the interface block commutes with it
    cb = commutator_blocks(suq2_bundle, suq2_bundle.ext.unit())
    assert cb.seminorm() == 0.0


def test_fourier_mode_feels_the_corner(suq2_bundle):
    z = suq2_bundle.ext.from_quotient_symbol({1: 1.0})
    cb = commutator_blocks(suq2_bundle, z)
    assert cb.norm_base() == pytest.approx(1.0, abs=1e-12)
    assert cb.norm_interface() > 0.1


def test_commutator_direct_rejects_unknown_selector(suq2_bundle):
    with pytest.raises(ContractViolation):
        commutator_direct(suq2_bundle, suq2_bundle.ext.unit(), "d4")


# ---------------------------------------------------------------------------
# corner injectivity
# ---------------------------------------------------------------------------


def test_p_injectivity_at_half_shift(suq2_small):
    rep = check_p_injectivity(suq2_small)
    assert rep.passed
    assert rep.min_singular == pytest.approx(0.5, abs=1e-12)
    assert rep.inverse_norm == pytest.approx(2.0, abs=1e-12)
    payload = rep.to_payload()
    assert set(payload) == {"min_singular", "inverse_norm", "passed"}


def test_p_injectivity_fails_at_zero_shift():
    ext = suq2_model(0.5, 4, 4, 0.0)
    rep = check_p_injectivity(ext)
    assert not rep.passed
    assert rep.min_singular == pytest.approx(0.0, abs=1e-12)
    assert rep.inverse_norm == float("inf")


def test_p_injectivity_requires_nonzero_corner():
    ext = ExtensionModel(name="rankless", quotient=circle_triple(2, 0.5),
                         fiber=two_point_triple(),
                         projection=diagonal_op(Line(2), lambda n: 0.0),
                         lambda_shift=0.5)
    with pytest.raises(ContractViolation):
        check_p_injectivity(ext)


# ---------------------------------------------------------------------------
# degenerate compact-fiber case
# ---------------------------------------------------------------------------


def test_compact_case_matches_general_assembly(compact_bundle):
    alt = split_compact_case(compact_bundle.ext)
    for name in ("d1", "d2", "d3", "di", "d"):
        assert_close(getattr(alt, name).mat, getattr(compact_bundle, name).mat,
                     0.0, f"compact-case {name}")


def test_compact_case_requires_zero_fiber_dirac(podles_small):
    with pytest.raises(ContractViolation):
        split_compact_case(podles_small)
