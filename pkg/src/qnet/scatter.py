"""Exact multiport scattering by dense complex linear solve.

This is the ground-truth engine every closed form is checked against.
Per frequency the state amplitudes obey ``A(omega) c = K^T v_in`` with

    A_ij = (sum over ports of K_pi K_pj) / 2 + i g_ij - i Delta_i delta_ij,
    Delta_i = omega - omega_i,

and the port-coupling matrix K stacking rows (sqrt(gamma_i)),
(sqrt(Gamma_i)), then one row per side channel.  The scattering matrix
follows as ``S = I - K A^{-1} K^T`` up to the fixed sign convention that
makes the input->output amplitude positive on resonance (conjugation by
diag(1, -1, 1, ...)); ports are ordered (a, b, m_1, m_2, ...).

All spectra use the e^{-i omega t} time convention.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import SingularSystem
from .netcore import NetworkSpec, SweepGrid, validate

_CHUNK_BYTES = 1 << 26  # ~64 MB of stacked A matrices per solve batch


def port_coupling_matrix(net: NetworkSpec) -> np.ndarray:
    """K with shape (P, N): rows sqrt(gamma), sqrt(Gamma), sqrt(mu_s)."""
    rows = [np.sqrt(net.input_decays), np.sqrt(net.output_decays)]
    rows.extend(np.sqrt(mu) for mu in net.side_decays)
    return np.array(rows)


def system_matrix(net: NetworkSpec, omega: float) -> np.ndarray:
    """State-space matrix A(omega), shape (N, N), complex."""
    K = port_coupling_matrix(net)
    return (
        0.5 * (K.T @ K)
        + 1j * net.coupling
        - 1j * np.diag(np.asarray(omega, float) - net.resonances)
    )


def _smatrices(net: NetworkSpec, freqs: np.ndarray) -> np.ndarray:
    """Batched S(omega) for a 1-D frequency array; shape (F, P, P)."""
    K = port_coupling_matrix(net)
    n, p = net.size, K.shape[0]
    base = 0.5 * (K.T @ K) + 1j * net.coupling
    A = np.broadcast_to(base, (len(freqs), n, n)).copy()
    delta = freqs[:, None] - net.resonances[None, :]
    idx = np.arange(n)
    A[:, idx, idx] -= 1j * delta
    rhs = np.broadcast_to(K.T, (len(freqs), n, p))
    try:
        X = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        # find the offending frequency for the error message
        for i, w in enumerate(freqs):
            try:
                np.linalg.solve(A[i], K.T)
            except np.linalg.LinAlgError:
                raise SingularSystem(float(w)) from None
        raise
    S = np.broadcast_to(np.eye(p), (len(freqs), p, p)) - K @ X
    bad = ~np.all(np.isfinite(S), axis=(1, 2))
    if np.any(bad):
        raise SingularSystem(float(freqs[int(np.argmax(bad))]))
    # sign convention: positive transmission amplitude on resonance
    S[:, 1, :] *= -1.0
    S[:, :, 1] *= -1.0
    return S


def smatrix(net: NetworkSpec, omega: float) -> np.ndarray:
    """S(omega) for a single frequency; raises SingularSystem if A(omega)
    is exactly singular (a state decoupled from every port at resonance)."""
    validate(net)
    return _smatrices(net, np.atleast_1d(np.asarray(omega, float)))[0]


@dataclass(frozen=True)
class ScatteringResponse:
    """Per-frequency S-matrices on a sweep grid, fixed port order (a, b, m...)."""

    grid: SweepGrid
    smatrices: np.ndarray

    def transmission(self) -> np.ndarray:
        """T(omega) = S[b <- a] over the grid."""
        return self.smatrices[:, 1, 0]

    def reflection(self) -> np.ndarray:
        """R(omega) = S[a <- a] over the grid."""
        return self.smatrices[:, 0, 0]

    def dark(self, m: int = 0) -> np.ndarray:
        """D_m(omega) = S[b <- m], coupling of side channel m into the output."""
        return self.smatrices[:, 1, 2 + m]

    def side_leakage(self, m: int = 0) -> np.ndarray:
        """S[m <- a]: amplitude lost from the input into side channel m."""
        return self.smatrices[:, 2 + m, 0]


def sweep(net: NetworkSpec, grid: SweepGrid, threads: int | None = None) -> ScatteringResponse:
    """Evaluate S(omega) on every grid point.

    Frequencies are independent work items written to pre-assigned
    slots, so the result is identical for any thread count.  ``threads``
    defaults to the QNET_THREADS environment variable (1 if unset).
    """
    validate(net)
    freqs = grid.frequencies
    p = net.n_ports
    chunk = max(1, _CHUNK_BYTES // (16 * net.size * net.size))
    spans = [(i, min(i + chunk, len(freqs))) for i in range(0, len(freqs), chunk)]
    out = np.empty((len(freqs), p, p), dtype=complex)
    if threads is None:
        threads = int(os.environ.get("QNET_THREADS", "1"))

    def work(span):
        lo, hi = span
        try:
            out[lo:hi] = _smatrices(net, freqs[lo:hi])
        except SingularSystem as exc:
            idx = int(np.searchsorted(freqs, exc.omega))
            raise SingularSystem(exc.omega, index=idx) from None

    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, spans))
    else:
        for span in spans:
            work(span)
    return ScatteringResponse(grid=grid, smatrices=out)


def flux_check(net: NetworkSpec, omega: float) -> float:
    """Max deviation of any column norm of S(omega) from unity.

    For a lossless network this is the unitarity defect; with side
    channels present, checking only the (a, b) sub-block instead would
    reveal the leakage."""
    S = smatrix(net, omega)
    return float(np.max(np.abs(np.linalg.norm(S, axis=0) - 1.0)))


def unitarity_defect(resp: ScatteringResponse) -> float:
    """Max-norm of S^dagger S - I over the whole sweep."""
    S = resp.smatrices
    gram = np.einsum("fji,fjk->fik", S.conj(), S)
    gram -= np.eye(S.shape[1])
    return float(np.max(np.abs(gram)))
