import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from topsqueeze.exceptions import InvalidConfigError, InvalidSpecError
from topsqueeze.lattice import (
    DisorderConfig,
    Hamiltonian,
    LatticeSpec,
    analytic_edge_mode,
    apply_disorder,
    band_edges,
    build_hamiltonian,
    diagonalize,
    edge_mode,
    load_lattice_config,
    read_hamiltonian_csv,
    rotating_frame,
    write_hamiltonian_csv,
)

alphas = st.floats(0.05, 0.8)
seeds = st.integers(0, 2**63)


def test_ssh_coupling_pattern():
    h = build_hamiltonian(LatticeSpec("ssh", 4, 0.3)).matrix
    assert h[0, 1] == 0.3 and h[1, 2] == 1.0 and h[2, 3] == 0.3
    assert np.all(np.diag(h) == 0)
    assert np.array_equal(h, h.T)


def test_impurity_couplings():
    spec = LatticeSpec("impurity", 3, 0.3)
    h = build_hamiltonian(spec).matrix
    assert spec.w == pytest.approx(3 / 7, abs=1e-12)
    assert h[0, 0] == pytest.approx(-(3 / 7) / 0.3, abs=1e-12)
    assert h[0, 1] == h[1, 2] == pytest.approx(3 / 7)
    assert h[1, 1] == h[2, 2] == 0


def test_single_dimer():
    h = build_hamiltonian(LatticeSpec("ssh", 2, 0.4, beta=0.7)).matrix
    np.testing.assert_array_equal(h, [[0.7, 0.4], [0.4, 0.7]])


@pytest.mark.parametrize("kwargs", [dict(sites=1), dict(alpha=0.0), dict(alpha=1.0), dict(alpha=-0.2), dict(sites=3.5)])
def test_invalid_specs(kwargs):
    base = dict(kind="ssh", sites=5, alpha=0.3)
    base.update(kwargs)
    with pytest.raises(InvalidSpecError):
        LatticeSpec(**base)


def test_unknown_kind():
    with pytest.raises(InvalidSpecError):
        LatticeSpec("kagome", 5, 0.3)


def test_hamiltonian_must_be_symmetric():
    spec = LatticeSpec("ssh", 2, 0.3)
    with pytest.raises(InvalidSpecError):
        Hamiltonian(np.array([[0.0, 1.0], [0.5, 0.0]]), spec)


def test_zero_width_disorder_is_identity():
    h = build_hamiltonian(LatticeSpec("ssh", 15, 0.3))
    for kind in ("hopping", "onsite"):
        np.testing.assert_array_equal(apply_disorder(h, DisorderConfig(kind, 0.0, 5)).matrix, h.matrix)


def test_negative_width_rejected():
    with pytest.raises(InvalidConfigError):
        DisorderConfig("hopping", -0.1, 0)


def test_hopping_disorder_intervals():
    h = build_hamiltonian(LatticeSpec("ssh", 15, 0.3))
    for seed in range(20):
        m = apply_disorder(h, DisorderConfig("hopping", 0.6, seed)).matrix
        off = np.diag(m, 1)
        assert np.all((off[0::2] >= 0.0) & (off[0::2] <= 0.6))
        assert np.all((off[1::2] >= 0.7) & (off[1::2] <= 1.3))
        assert np.all(np.diag(m) == 0)


def test_onsite_disorder_touches_only_diagonal():
    h = build_hamiltonian(LatticeSpec("impurity", 15, 0.3))
    m = apply_disorder(h, DisorderConfig("onsite", 0.6, 3)).matrix
    np.testing.assert_array_equal(m - np.diag(np.diag(m)), h.matrix - np.diag(np.diag(h.matrix)))
    assert np.all(np.abs(np.diag(m) - np.diag(h.matrix)) <= 0.3)


def test_disorder_is_deterministic():
    h = build_hamiltonian(LatticeSpec("ssh", 15, 0.3))
    a = apply_disorder(h, DisorderConfig("hopping", 0.6, 42)).matrix
    b = apply_disorder(h, DisorderConfig("hopping", 0.6, 42)).matrix
    assert a.tobytes() == b.tobytes()


@given(alphas, seeds, st.sampled_from(["ssh", "impurity"]), st.sampled_from(["hopping", "onsite"]))
def test_disorder_keeps_symmetry_and_sparsity(alpha, seed, kind, dkind):
    h = build_hamiltonian(LatticeSpec(kind, 15, alpha))
    m = apply_disorder(h, DisorderConfig(dkind, 0.8, seed)).matrix
    assert np.array_equal(m, m.T)
    if dkind == "hopping":
        # only the resampled couplings may be nonzero off the diagonal
        assert np.array_equal(np.triu(m, 2), np.zeros_like(m))


def test_diagonalize_two_by_two():
    evals, q = diagonalize(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(evals, [-1, 1], atol=1e-14)
    np.testing.assert_allclose(np.abs(q[:, 0]), [1 / np.sqrt(2)] * 2, atol=1e-14)
    assert q[0, 0] * q[1, 0] < 0 and q[0, 1] * q[1, 1] > 0


@given(alphas, seeds, st.sampled_from(["ssh", "impurity"]))
def test_diagonalize_reconstructs(alpha, seed, kind):
    h = apply_disorder(build_hamiltonian(LatticeSpec(kind, 15, alpha)), DisorderConfig("onsite", 0.5, seed))
    evals, q = diagonalize(h)
    assert np.all(np.diff(evals) >= 0)
    assert np.abs(h.matrix @ q - q * evals).max() < 1e-10 * max(1.0, np.abs(h.matrix).max())
    assert np.abs(q.conj().T @ q - np.eye(15)).max() < 1e-10


def test_odd_ssh_has_exact_zero_mode():
    evals, _ = diagonalize(build_hamiltonian(LatticeSpec("ssh", 15, 0.3)))
    assert np.sum(np.abs(evals) < 1e-12) == 1


def test_impurity_mode_outside_band():
    spec = LatticeSpec("impurity", 15, 0.3)
    lo, hi = band_edges(spec)
    mode = edge_mode(build_hamiltonian(spec))
    assert mode.kappa < lo
    assert mode.kappa == pytest.approx(analytic_edge_mode(spec).kappa, abs=1e-12)


def test_ssh_edge_mode_profile():
    spec = LatticeSpec("ssh", 15, 0.3)
    mode = edge_mode(build_hamiltonian(spec))
    assert np.abs(mode.coeffs[1::2]).max() < 1e-12
    ratios = mode.coeffs[2::2] / mode.coeffs[0:-2:2]
    np.testing.assert_allclose(ratios.real, -0.3, atol=1e-12)
    assert mode.coeffs[0].real > 0 and mode.coeffs[0].imag == 0
    assert abs(np.linalg.norm(mode.coeffs) - 1) < 1e-12


def test_analytic_ssh_coefficients():
    c = analytic_edge_mode(LatticeSpec("ssh", 15, 0.3)).coeffs.real
    # (1 - a^2) / (1 - a^16) renormalization of the truncated geometric profile
    norm = np.sqrt((1 - 0.09) / (1 - 0.09**8))
    assert c[0] == pytest.approx(norm, abs=1e-12)
    assert c[0] == pytest.approx(0.953939, abs=1e-6)
    assert c[2] == pytest.approx(-0.286182, abs=1e-6)


def test_geometric_series_limit():
    alpha = 0.3
    n = np.arange(200)
    assert np.sum((1 - alpha**2) * alpha ** (2 * n)) == pytest.approx(1.0, abs=1e-14)


def test_impurity_ratio():
    c = edge_mode(build_hamiltonian(LatticeSpec("impurity", 15, 0.3))).coeffs
    assert (c[1] / c[0]).real == pytest.approx(-0.3, abs=1e-8)


@given(alphas)
def test_ssh_edge_mode_matches_closed_form(alpha):
    spec = LatticeSpec("ssh", 15, alpha)
    diff = edge_mode(build_hamiltonian(spec)).coeffs - analytic_edge_mode(spec).coeffs
    assert np.abs(diff).max() < 1e-10


@given(st.floats(0.05, 0.5))
def test_impurity_edge_mode_matches_closed_form_on_long_chain(alpha):
    # the truncated profile misses the far-end reflection, of order alpha**sites
    spec = LatticeSpec("impurity", 40, alpha)
    diff = edge_mode(build_hamiltonian(spec)).coeffs - analytic_edge_mode(spec).coeffs
    assert np.abs(diff).max() < 1e-10


def test_impurity_truncation_defect_at_fifteen_sites():
    spec = LatticeSpec("impurity", 15, 0.3)
    diff = np.abs(edge_mode(build_hamiltonian(spec)).coeffs - analytic_edge_mode(spec).coeffs).max()
    assert diff < 0.3**15


@given(alphas, seeds, st.sampled_from([0.2, 0.6, 1.0]))
def test_chiral_pairing_under_hopping_disorder(alpha, seed, d):
    h = apply_disorder(build_hamiltonian(LatticeSpec("ssh", 15, alpha)), DisorderConfig("hopping", d, seed))
    evals, _ = diagonalize(h)
    np.testing.assert_allclose(np.sort(evals), np.sort(-evals), atol=1e-10)


@given(seeds)
def test_hopping_disordered_mode_is_sublattice_polarized(seed):
    h = apply_disorder(build_hamiltonian(LatticeSpec("ssh", 15, 0.3)), DisorderConfig("hopping", 0.6, seed))
    assert np.sum(np.abs(edge_mode(h).coeffs[1::2]) ** 2) < 1e-20


def test_onsite_disorder_breaks_polarization():
    h0 = build_hamiltonian(LatticeSpec("ssh", 15, 0.3))
    broken = sum(
        np.sum(np.abs(edge_mode(apply_disorder(h0, DisorderConfig("onsite", 0.6, s))).coeffs[1::2]) ** 2) > 1e-20
        for s in range(100)
    )
    assert broken >= 90


def test_rotating_frame_pins_edge_mode():
    for kind in ("ssh", "impurity"):
        spec = rotating_frame(LatticeSpec(kind, 15, 0.3))
        assert abs(edge_mode(build_hamiltonian(spec)).kappa) < 1e-12
    assert rotating_frame(LatticeSpec("ssh", 15, 0.3)).beta == 0.0


def test_config_round_trip(tmp_path):
    path = tmp_path / "lattice.yaml"
    path.write_text("kind: ssh\nsites: 9\nalpha: 0.25\ndisorder:\n  kind: onsite\n  width: 0.4\n  seed: 11\n")
    spec, dis = load_lattice_config(path)
    assert spec.sites == 9 and spec.alpha == 0.25 and dis.width == 0.4 and dis.seed == 11
    jpath = tmp_path / "lattice.json"
    jpath.write_text(json.dumps({"kind": "impurity", "sites": 5, "alpha": 0.3, "disorder.kind": "hopping"}))
    spec, dis = load_lattice_config(jpath)
    assert spec.kind.value == "impurity" and dis.width == 0.0


def test_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("kind: ssh\nsites: 9\nalpha: 0.25\nlength: 3\n")
    with pytest.raises(InvalidConfigError, match="length"):
        load_lattice_config(path)


def test_hamiltonian_csv_round_trip(tmp_path):
    h = apply_disorder(build_hamiltonian(LatticeSpec("ssh", 7, 0.3)), DisorderConfig("hopping", 0.6, 1))
    write_hamiltonian_csv(h, tmp_path / "h.csv")
    np.testing.assert_array_equal(read_hamiltonian_csv(tmp_path / "h.csv"), h.matrix)
