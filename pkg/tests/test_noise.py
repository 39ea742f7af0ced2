import itertools

import numpy as np
import pytest

from hrsp.linalg import I2, kron, projector
from hrsp.noise import (NoiseScenario, TraceDeficitWarning, amplitude_damping,
                        apply_channel, kraus_set, phase_damping)
from hrsp.states import protocol_state

ETA_GRID = [round(0.1 * i, 10) for i in range(11)]


def protocol_rho():
    return projector(protocol_state())


def brute_force_correlated(rho, ops):
    """Independent oracle: explicit sum over the three receiver indices."""
    out = np.zeros_like(rho)
    for i, j, l in itertools.product(range(len(ops)), repeat=3):
        a = kron(I2, ops[i], ops[i], ops[j], ops[j], ops[l], ops[l])
        out += a @ rho @ a.conj().T
    return out


class TestKrausSets:
    def test_ad_eta_zero(self):
        ks = amplitude_damping(0.0)
        assert np.allclose(ks.operators[0], I2)
        assert np.allclose(ks.operators[1], 0)

    def test_ad_eta_one(self):
        k0, k1 = amplitude_damping(1.0).operators
        assert np.allclose(k0, np.diag([1.0, 0.0]))
        assert np.allclose(k1, [[0, 1], [0, 0]])

    def test_ad_eta_half(self):
        k0, k1 = amplitude_damping(0.5).operators
        assert np.allclose(k0, np.diag([1.0, 1 / np.sqrt(2)]))
        assert np.isclose(k1[0, 1], 1 / np.sqrt(2))

    def test_pd_eta_zero(self):
        e0, e1, e2 = phase_damping(0.0).operators
        assert np.allclose(e0, I2)
        assert np.allclose(e1, 0)
        assert np.allclose(e2, 0)

    def test_pd_eta_one(self):
        e0, e1, e2 = phase_damping(1.0).operators
        assert np.allclose(e0, 0)
        assert np.allclose(e1, np.diag([1.0, 0.0]))
        assert np.allclose(e2, np.diag([0.0, 1.0]))

    @pytest.mark.parametrize("kind", ["ad", "pd"])
    def test_completeness_on_grid(self, kind):
        for eta in ETA_GRID:
            assert kraus_set(kind, eta).completeness_defect() < 1e-12

    @pytest.mark.parametrize("kind", ["ad", "pd"])
    @pytest.mark.parametrize("eta", [-0.1, 1.1])
    def test_eta_out_of_range(self, kind, eta):
        with pytest.raises(ValueError):
            kraus_set(kind, eta)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            kraus_set("dp", 0.1)


class TestCorrelatedChannel:
    @pytest.mark.parametrize("kind", ["ad", "pd"])
    def test_eta_zero_is_identity(self, kind):
        rho = protocol_rho()
        out = apply_channel(rho, NoiseScenario(kraus=kraus_set(kind, 0.0)))
        assert np.max(np.abs(out - rho)) < 1e-14

    def test_ad_eta_one_trace_matches_oracle(self):
        rho = protocol_rho()
        out = apply_channel(rho, NoiseScenario(kraus=amplitude_damping(1.0)))
        want = brute_force_correlated(rho, amplitude_damping(1.0).operators)
        assert np.max(np.abs(out - want)) < 1e-12
        assert np.isclose(np.trace(out).real, 0.25)

    def test_pd_channel_matches_oracle(self):
        rho = protocol_rho()
        ops = phase_damping(0.4).operators
        out = apply_channel(rho, NoiseScenario(kraus=phase_damping(0.4)))
        assert np.max(np.abs(out - brute_force_correlated(rho, ops))) < 1e-12

    def test_pd_only_shrinks_coherences(self):
        rho = protocol_rho()
        out = apply_channel(rho, NoiseScenario(kraus=phase_damping(0.5)))
        off = ~np.eye(128, dtype=bool)
        assert np.all(np.abs(out[off]) <= np.abs(rho[off]) + 1e-12)

    def test_pd_coherences_shrink_monotonically_on_grid(self):
        rho = protocol_rho()
        off = ~np.eye(128, dtype=bool)
        prev = np.abs(rho[off])
        for eta in ETA_GRID[1:]:
            cur = np.abs(apply_channel(
                rho, NoiseScenario(kraus=phase_damping(eta)))[off])
            assert np.all(cur <= prev + 1e-12)
            prev = cur

    @pytest.mark.parametrize("kind", ["ad", "pd"])
    def test_output_hermitian_psd_trace_in_unit_interval(self, kind):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((128, 6)) + 1j * rng.standard_normal((128, 6))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        for eta in (0.0, 0.3, 0.7, 1.0):
            out = apply_channel(rho, NoiseScenario(kraus=kraus_set(kind, eta)))
            assert np.max(np.abs(out - out.conj().T)) < 1e-12
            assert np.linalg.eigvalsh(out)[0] > -1e-10
            tr = np.trace(out).real
            assert 0.0 < tr <= 1.0 + 1e-12

    def test_trace_deficit_warns_once_category(self):
        with pytest.warns(TraceDeficitWarning):
            apply_channel(protocol_rho(),
                          NoiseScenario(kraus=amplitude_damping(0.5)))

    def test_uncorrelated_mode_is_trace_preserving(self):
        rho = protocol_rho()
        out = apply_channel(rho, NoiseScenario(kraus=amplitude_damping(0.7),
                                               correlated=False))
        assert np.isclose(np.trace(out).real, 1.0, atol=1e-12)

    def test_alice_never_noisy(self):
        with pytest.raises(ValueError):
            NoiseScenario(kraus=amplitude_damping(0.1),
                          noisy_parties=("alice", "bob"))

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            apply_channel(np.eye(64, dtype=complex),
                          NoiseScenario(kraus=amplitude_damping(0.1)))
