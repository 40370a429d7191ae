import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings
from scipy.linalg import block_diag

from numeric.fields import ScalarField
from numeric.spectral import admissible_cutoffs, eig_selfadjoint
from numeric.tolerances import DEFAULT_TOLERANCES
from spectral.det_lines import (det_adjoint_pairing, det_chart_change, det_equal, det_move, det_negative_iso,
                                det_orientation, det_ratio, det_reference, det_sum_iso, det_structure_isos,
                                singular_split)
from spectral.pfaffian_lines import pf_chart_change, pf_dual_pairing, pf_equal, pf_orientation, pf_reference, pf_sum
from spectral.spectral_torsor import kcount, sp_chart, sp_equal, sp_make, sp_mod_k, sp_negative_dual, sp_sum
from spectral.transport import (OperatorPath, crossing_count_flow, sp_mod2_orientation, spectral_flow,
                                transport_along_path)
from utils.errors import DimensionMismatchError, InadmissibleCutoffError, UsageError

D_HALF = np.array([[0.5, 0.0], [0.0, 0.0]])
D_ROW = np.array([[0.0, 3.0]])
SKEW = np.array([[0.0, -2.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, 0.0]])


def test_singular_split_clusters_and_kernels():
    split = singular_split(np.diag([3.0, 1.0, 0.0]))
    assert np.allclose(split.nonzero_values(), [1.0, 3.0])
    assert split.right_kernel.shape == (3, 1)
    assert split.left_kernel.shape == (3, 1)


def test_det_reference_lengths_give_index(cfg):
    D = np.array([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]])
    for delta in (0.0, 1.5, 3.0):
        x = det_reference(D, delta, cfg)
        assert x.plus.length - x.dual.length == 1
    with pytest.raises(InadmissibleCutoffError):
        det_reference(D, 1.0, cfg)


def test_det_chart_changes_compose(cfg):
    x = det_reference(np.diag([0.5, 1.0, 2.0]), 0.0, cfg)
    direct = det_chart_change(x, 3.0, cfg)
    stepped = det_chart_change(det_chart_change(x, 0.75, cfg), 3.0, cfg)
    assert det_equal(direct, stepped, cfg=cfg)
    assert det_equal(det_move(direct, 0.0, cfg), x, cfg=cfg)


def test_det_orientation_of_scaled_reference(cfg):
    x = det_reference(D_HALF, 1.0, cfg)
    assert det_orientation(x, cfg) == 1
    assert det_orientation(x.scaled(-2.0), cfg) == -1
    assert det_ratio(x.scaled(3.0), x, cfg) == pytest.approx(3.0)


def test_det_negative_iso_sign(cfg):
    x = det_reference(D_HALF, 0.0, cfg)
    negated = det_negative_iso(x, cfg)
    assert np.array_equal(negated.operator, -D_HALF)
    assert negated.element.ratio_to(x.element) == pytest.approx(-1.0)
    even = det_reference(np.eye(2), 0.0, cfg)
    assert det_negative_iso(even, cfg).element.ratio_to(even.element) == pytest.approx(1.0)


def test_det_adjoint_pairing_is_unimodular(cfg):
    D = np.array([[1.0, 2.0, 0.0], [0.0, 0.0, 0.0]])
    value = det_adjoint_pairing(det_reference(D.T, 0.0, cfg), det_reference(D, 0.0, cfg), cfg)
    assert abs(abs(value) - 1.0) < 1e-9
    with pytest.raises(DimensionMismatchError):
        det_adjoint_pairing(det_reference(D, 0.0, cfg), det_reference(D, 0.0, cfg), cfg)


def test_derived_sum_convention_commutes_with_charts(cfg):
    x0 = det_reference(D_HALF, 0.0, cfg)
    x1 = det_chart_change(x0, 1.0, cfg)
    y0 = det_reference(D_ROW, 0.0, cfg)
    assert det_equal(det_sum_iso(x0, y0, "derived", cfg), det_sum_iso(x1, y0, "derived", cfg), cfg=cfg)
    printed = det_ratio(det_sum_iso(x0, y0, "printed", cfg), det_sum_iso(x1, y0, "printed", cfg), cfg)
    assert printed == pytest.approx(-1.0)


def test_det_structure_dispatch(cfg):
    x = det_reference(D_HALF, 0.0, cfg)
    assert det_structure_isos("negative", x, cfg=cfg).operator.tolist() == (-D_HALF).tolist()
    with pytest.raises(UsageError):
        det_structure_isos("tensor", x)
    with pytest.raises(UsageError):
        det_sum_iso(x, x, "other", cfg)


def test_pf_chart_change_follows_the_complex_structure(cfg):
    up = pf_chart_change(pf_reference(SKEW, 0.0, cfg), 3.0, cfg)
    assert pf_orientation(up, cfg) == 1
    down = pf_chart_change(pf_reference(-SKEW, 0.0, cfg), 3.0, cfg)
    assert pf_orientation(down, cfg) == -1


def test_pf_dual_pairing_and_sum(cfg):
    x = pf_reference(SKEW, 0.0, cfg)
    y = pf_reference(-SKEW, 0.0, cfg)
    assert pf_dual_pairing(y, x, cfg) == pytest.approx(1.0)
    total = pf_sum(x, pf_reference(np.zeros((1, 1)), 0.0, cfg), cfg)
    assert total.operator.shape == (4, 4)
    assert total.element.length == 2


def test_pf_rejects_symmetric_models(cfg):
    with pytest.raises(UsageError):
        pf_reference(np.eye(2), 0.5, cfg)


def test_sp_chart_moves(cfg):
    x = sp_make(np.diag([-1.0, 1.0, 2.0]), 0, 0.0, cfg)
    up = sp_chart(x, 1.5, cfg)
    assert up.m == 1
    assert sp_chart(up, 0.0, cfg).m == 0
    assert sp_equal(up, x, cfg)
    assert sp_chart(x, -3.0, cfg).m == -1
    with pytest.raises(InadmissibleCutoffError):
        sp_chart(x, 1.0, cfg)


def test_sp_negative_dual_is_chart_independent(cfg):
    D = np.diag([-1.0, 1.0, 2.0])
    x = sp_make(D, 0, 0.0, cfg)
    y = sp_make(-D, 0, 0.0, cfg)
    assert sp_negative_dual(y, x, cfg) == 0
    assert sp_negative_dual(sp_chart(y, 1.5, cfg), x, cfg) == 0
    with pytest.raises(DimensionMismatchError):
        sp_negative_dual(x, x, cfg)


def test_sp_sum_and_quotients(cfg):
    x = sp_make(np.diag([-1.0, 1.0]), 2, 0.0, cfg)
    y = sp_make(np.diag([2.0]), 3, 0.0, cfg)
    total = sp_sum(x, y, cfg)
    assert total.m == 5 and total.model.dim == 3
    assert sp_mod_k(total, 2).m == 1
    with pytest.raises(UsageError):
        sp_mod_k(total, 1)


def test_kcount_needs_whole_modules(cfg):
    model = eig_selfadjoint(np.diag([1.0, 2.0]), cfg, ScalarField.C)
    with pytest.raises(DimensionMismatchError):
        kcount(model, 0.0, 1.5)
    assert kcount(model, 0.0, 3.0) == 1


def test_mod2_orientation_depends_on_parity(cfg):
    D = np.diag([-1.0, 0.5, 2.0])
    even = sp_mod2_orientation(sp_make(D, 0, 1.0, cfg), cfg=cfg)
    odd = sp_mod2_orientation(sp_make(D, 1, 1.0, cfg), cfg=cfg)
    shifted = sp_mod2_orientation(sp_make(D, 2, 1.0, cfg), cfg=cfg)
    assert det_ratio(even, odd, cfg) == pytest.approx(-1.0)
    assert det_ratio(even, shifted, cfg) == pytest.approx(1.0)


def test_spectral_flow_single_crossing(cfg):
    path = OperatorPath.from_samples([np.diag([-1.0, 2.0]), np.diag([1.0, 2.0])])
    assert spectral_flow(path, 0.0, cfg) == 1
    assert crossing_count_flow(path, 0.0, cfg) == 1
    assert spectral_flow(path.reversed(), 0.0, cfg) == -1


def test_spectral_flow_there_and_back(cfg):
    path = OperatorPath.from_samples([np.diag([-1.0]), np.diag([1.0]), np.diag([-1.0])])
    assert spectral_flow(path, 0.0, cfg) == 0


def test_det_transport_through_kernel_change(cfg):
    path = OperatorPath.from_function(lambda t: np.diag([t, 1.0]), 0.0, 0.5, 0.1)
    start = det_reference(path.start, 0.0, cfg)
    end = transport_along_path(path, start, cfg)
    assert np.allclose(end.operator, path.end)
    assert det_orientation(det_move(end, 0.0, cfg), cfg) in (-1, 1)


def test_transport_rejects_foreign_start(cfg):
    path = OperatorPath.constant(np.eye(2))
    with pytest.raises(DimensionMismatchError):
        transport_along_path(path, det_reference(np.eye(3), 0.0, cfg), cfg)


_HALF_STEPS = st.lists(st.integers(min_value=-6, max_value=6), min_size=1, max_size=5).map(
    lambda v: np.array(v, dtype=float) / 2.0)


def _three_charts(values, data):
    charts = admissible_cutoffs(np.abs(values), DEFAULT_TOLERANCES)
    return sorted(data.draw(st.sampled_from(charts)) for _ in range(3))


@settings(max_examples=40, deadline=None)
@given(_HALF_STEPS, st.integers(min_value=-3, max_value=3), st.data())
def test_det_and_sp_chart_systems_compose(values, m, data):
    cfg = DEFAULT_TOLERANCES
    delta, middle, top = _three_charts(values, data)
    x = det_reference(np.diag(values), delta, cfg)
    stepped = det_chart_change(det_chart_change(x, middle, cfg), top, cfg)
    assert det_equal(det_chart_change(x, top, cfg), stepped, cfg=cfg)
    assert det_equal(det_move(stepped, delta, cfg), x, cfg=cfg)
    y = sp_make(np.diag(values), m, delta, cfg)
    assert sp_equal(sp_chart(sp_chart(y, top, cfg), middle, cfg), sp_chart(y, middle, cfg), cfg)
    assert sp_chart(sp_chart(y, top, cfg), delta, cfg).m == m


@settings(max_examples=40, deadline=None)
@given(_HALF_STEPS, st.data())
def test_pf_chart_system_composes(values, data):
    cfg = DEFAULT_TOLERANCES
    D = block_diag(*[np.array([[0.0, -v], [v, 0.0]]) for v in values])
    delta, middle, top = _three_charts(values, data)
    x = pf_reference(D, delta, cfg)
    stepped = pf_chart_change(pf_chart_change(x, middle, cfg), top, cfg)
    assert pf_equal(pf_chart_change(x, top, cfg), stepped, cfg=cfg)
    assert pf_equal(pf_chart_change(stepped, delta, cfg), x, cfg=cfg)
