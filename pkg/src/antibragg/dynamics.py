"""Time propagation of the density matrix and spin-spin correlators."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .model import apply_liouvillian
from .operators import ArrayParams, lowering_op

DEFAULT_SAMPLES = 200
DEFAULT_RTOL = 1e-10
POSITIVITY_FLOOR = -1e-6


@dataclass
class Trajectory:
    params: ArrayParams
    times: np.ndarray          # units 1/gamma_1d
    correlators: np.ndarray    # (samples, N, N), entry [t, n, m] = <sigma_n^dag sigma_m>
    trace_drift: np.ndarray    # |Tr rho - 1| per sample
    purity: np.ndarray         # Tr rho^2 per sample
    final_rho: Optional[np.ndarray] = None


def fully_excited_state(n_qubits):
    """Projector onto the all-excited product state.

    The single-qubit basis is (ground, excited), so all-excited is the
    last basis index."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    dim = 2 ** n_qubits
    rho = np.zeros((dim, dim), dtype=complex)
    rho[dim - 1, dim - 1] = 1.0
    return rho


def correlator(rho, n, m):
    """<sigma_n^dag sigma_m> = Tr[rho sigma_n^dag sigma_m], 1-based sites."""
    rho = np.asarray(rho)
    n_qubits = int(round(np.log2(rho.shape[0])))
    if not (1 <= n <= n_qubits and 1 <= m <= n_qubits):
        raise ValueError(f"site indices ({n}, {m}) out of range 1..{n_qubits}")
    sn = lowering_op(n, n_qubits).toarray()
    sm = lowering_op(m, n_qubits).toarray()
    return complex(np.trace(rho @ sn.conj().T @ sm))


def correlation_map(rho, sig=None):
    rho = np.asarray(rho)
    n_qubits = int(round(np.log2(rho.shape[0])))
    if sig is None:
        sig = [lowering_op(k, n_qubits).toarray() for k in range(1, n_qubits + 1)]
    c = np.empty((n_qubits, n_qubits), dtype=complex)
    for n in range(n_qubits):
        for m in range(n_qubits):
            c[n, m] = np.trace(rho @ sig[n].conj().T @ sig[m])
    return c


def _check_initial_state(rho0):
    if np.max(np.abs(rho0 - rho0.conj().T)) > 1e-10:
        raise ValueError("initial state must be Hermitian")
    if abs(np.trace(rho0) - 1.0) > 1e-10:
        raise ValueError("initial state must have unit trace")
    if np.min(np.linalg.eigvalsh(rho0)) < -1e-10:
        raise ValueError("initial state must be positive semidefinite")


def evolve(params: ArrayParams, rho0, t_max, samples=DEFAULT_SAMPLES,
           rtol=DEFAULT_RTOL, keep_final=True) -> Trajectory:
    """Integrate d rho/dt = L rho with an adaptive embedded Runge-Kutta
    scheme (DOP853), sampling correlators on a uniform output grid.

    Positivity is monitored on a sparse subset of samples; a violation
    beyond POSITIVITY_FLOOR indicates integrator failure and aborts.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    dim = 2 ** params.n_qubits
    if rho0.shape != (dim, dim):
        raise ValueError(f"initial state must be {dim}x{dim}")
    _check_initial_state(rho0)

    def rhs(t, y):
        return apply_liouvillian(params, y.reshape(dim, dim)).ravel()

    times = np.linspace(0.0, t_max, samples)
    sol = solve_ivp(rhs, (0.0, t_max), rho0.ravel(), method="DOP853",
                    t_eval=times, rtol=rtol, atol=rtol * 1e-2)
    if not sol.success:
        raise ArithmeticError(f"integration failed at t={sol.t[-1] if len(sol.t) else 0.0}: "
                              f"{sol.message}")

    n = params.n_qubits
    sig = [lowering_op(k, n).toarray() for k in range(1, n + 1)]
    corr = np.empty((samples, n, n), dtype=complex)
    drift = np.empty(samples)
    purity = np.empty(samples)
    pos_check_stride = max(1, samples // 10)
    for i in range(samples):
        rho = sol.y[:, i].reshape(dim, dim)
        corr[i] = correlation_map(rho, sig)
        drift[i] = abs(np.trace(rho) - 1.0)
        purity[i] = float(np.real(np.trace(rho @ rho)))
        if i % pos_check_stride == 0:
            wmin = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
            if wmin < POSITIVITY_FLOOR:
                raise ArithmeticError(
                    f"density matrix lost positivity ({wmin:.3e}) at t={times[i]:.4g}")

    final = sol.y[:, -1].reshape(dim, dim) if keep_final else None
    return Trajectory(params=params, times=times, correlators=corr,
                      trace_drift=drift, purity=purity, final_rho=final)
