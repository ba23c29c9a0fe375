import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from hybrident.config import reference_params
from hybrident.lyapunov import solve_lyapunov
from hybrident.model import MODES, build_diffusion_matrix, build_drift_matrix
from hybrident.spectrum import (
    SpectrumTrace,
    default_grid,
    find_peaks,
    intracavity_spectrum,
    mode_drift_matrix,
    output_spectrum,
    peak_linewidth,
    peak_splitting,
    solve_fluctuations,
    write_trace,
)

from .conftest import MHZ


def _decoupled(params, **kw):
    return params.replace(g_ma=0.0, g_b1b2=0.0, G_m=0.0, G_c=0.0, **kw)


def _quadrature_transform():
    # (x, y) = T (d, d^dag) per mode
    t = np.array([[1, 1], [-1j, 1j]]) / math.sqrt(2)
    return np.kron(np.eye(5), t)


class TestDrift:
    def test_matches_quadrature_drift(self, fig2_params):
        T = _quadrature_transform()
        A = T @ mode_drift_matrix(fig2_params) @ np.linalg.inv(T)
        assert np.allclose(A.imag, 0, atol=1e-6)
        np.testing.assert_allclose(A.real, build_drift_matrix(fig2_params), atol=1e-6)

    def test_dagger_rows_are_conjugates(self, fig4_params):
        K = mode_drift_matrix(fig4_params)
        swap = np.kron(np.eye(5), np.array([[0, 1], [1, 0]]))
        np.testing.assert_allclose(swap @ K @ swap, K.conj())


class TestResponse:
    @pytest.mark.parametrize("omega_mhz", [-30.0, 0.0, 19.0, 20.11, 25.0])
    def test_single_cavity_lorentzian(self, fig2_params, omega_mhz):
        p = _decoupled(fig2_params)
        w = omega_mhz * MHZ
        resp = solve_fluctuations(p, None, w)
        expected = math.sqrt(2 * p.gamma_c) / (p.gamma_c + 1j * (p.delta_c_eff - w))
        assert resp.coefficient("c") == pytest.approx(expected, rel=1e-12)
        assert resp.coefficient("c", dagger=True) == 0
        for mode in ("b1", "b2", "m", "a"):
            assert resp.coefficient(mode) == 0 and resp.coefficient(mode, dagger=True) == 0

    def test_zero_optomechanical_coupling_isolates_cavity(self, fig2_params):
        p = fig2_params.replace(G_c=0.0)
        resp = solve_fluctuations(p, None, 20.1 * MHZ)
        for mode in ("b1", "b2", "m", "a"):
            assert abs(resp.coefficient(mode)) < 1e-15
            assert abs(resp.coefficient(mode, dagger=True)) < 1e-15

    def test_mechanical_response_peaks_at_hybrid_frequencies(self, fig2_params):
        p = fig2_params.replace(G_m=0.0, G_c=0.2e6 * 2 * math.pi)
        grid = np.linspace(15, 25, 4001) * MHZ
        mag = np.array([abs(solve_fluctuations(p, None, w).coefficient("b2")) for w in grid[::20]])
        w_peak = grid[::20][np.argmax(mag)]
        # b1 and b2 hybridize into normal modes split by about 2 g_b1b2
        centre = 0.5 * (p.omega_b1 + p.omega_b2)
        assert abs(abs(w_peak - centre) - p.g_b1b2) < 0.1 * p.g_b1b2


class TestSpectrum:
    def test_vacuum_gives_zero(self, fig2_params):
        p = _decoupled(fig2_params, temperature=0.0)
        grid = default_grid(p, count=201)
        np.testing.assert_array_equal(output_spectrum(p, None, grid).S, 0.0)
        np.testing.assert_array_equal(intracavity_spectrum(p, None, grid).S, 0.0)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(0.0, 0.5))
    def test_real_nonnegative(self, gm, gc, temp):
        p = reference_params(G_m=gm * 1e6, G_c=gc * 1e6, temperature=temp)
        S = output_spectrum(p, None, default_grid(p, count=301)).S
        assert S.dtype.kind == "f"
        assert np.all(S >= 0)

    def test_optical_bath_stays_empty_when_hot(self, fig2_params):
        p = _decoupled(fig2_params, temperature=0.5)
        grid = np.linspace(-40, 40, 101) * MHZ
        S = intracavity_spectrum(p, None, grid).S
        N = p.occupations()["c"]
        # optical N is negligible: exp(-h nu / kT) underflows to zero
        assert N == 0
        np.testing.assert_array_equal(S, 0.0)

    def test_intracavity_integral_matches_covariance(self, fig2_params):
        p = fig2_params
        V = solve_lyapunov(build_drift_matrix(p), build_diffusion_matrix(p))
        k = 2 * MODES.index("c")
        n_c = 0.5 * (V[k, k] + V[k + 1, k + 1] - 1.0)

        def S(w):
            return intracavity_spectrum(p, None, [w]).S[0]

        poles = np.sort(np.linalg.eigvals(mode_drift_matrix(p)).imag)
        lo, hi = poles[0] - 200 * MHZ, poles[-1] + 200 * MHZ
        inner, _ = integrate.quad(S, lo, hi, points=poles, limit=500, epsrel=1e-10)
        tails = sum(integrate.quad(S, *lim, limit=200)[0] for lim in ((-np.inf, lo), (hi, np.inf)))
        assert (inner + tails) / (2 * math.pi) == pytest.approx(n_c, rel=1e-2)


class TestPeaks:
    def _trace(self, centres, width=1.0):
        w = np.linspace(-10, 10, 2001)
        S = sum(1 / (1 + ((w - c) / width) ** 2) for c in centres)
        return SpectrumTrace(w, S)

    def test_two_peaks(self):
        tr = self._trace([-3.0, 3.0])
        assert len(find_peaks(tr)) == 2
        assert peak_splitting(tr) == pytest.approx(6.0, abs=0.05)

    def test_single_peak_has_no_splitting(self):
        tr = self._trace([0.5])
        assert peak_splitting(tr) is None
        assert peak_linewidth(tr) == pytest.approx(2.0, rel=1e-2)

    def test_small_bumps_ignored(self):
        w = np.linspace(-10, 10, 2001)
        S = 1 / (1 + w**2) + 0.05 / (1 + ((w - 6) / 0.2) ** 2)
        assert len(find_peaks(SpectrumTrace(w, S))) == 1

    def test_flat_zero_trace(self):
        tr = SpectrumTrace(np.linspace(0, 1, 11), np.zeros(11))
        assert find_peaks(tr).size == 0
        assert peak_splitting(tr) is None


def test_write_trace_round_trip():
    w = np.linspace(1.0, 2.0, 7) * MHZ
    tr = SpectrumTrace(w, np.linspace(0, 1, 7) / 3)
    buf = io.StringIO()
    write_trace(tr, buf, "first\nsecond")
    text = buf.getvalue()
    assert text.startswith("# first\n# second\n# freq_hz S\n")
    data = np.loadtxt(io.StringIO(text))
    np.testing.assert_array_equal(data[:, 0], tr.freq_hz)
    np.testing.assert_array_equal(data[:, 1], tr.S)
