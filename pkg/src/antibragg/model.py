"""Effective Hamiltonian and vectorized Lindblad superoperator.

The master equation is

    d rho / dt = L rho
               = 2 gamma_1d sum_{m,n} cos[phi (m-n)] sigma_m rho sigma_n^dag
                 - i (H rho - rho H^dag)

with H = H0 + V,

    H0 = -i gamma_1d sum_{m,n} sigma_m^dag sigma_n exp(i phi |m-n|)
    V  = omega_r sum_n (sigma_n^dag exp(-i phi n) + h.c.)

in the frame rotating at the qubit resonance. The anti-Hermitian
combination is written as -i(H rho - rho H^dag); this is the unique
ordering that preserves the trace together with the jump term above.

Vectorization is column-stacking throughout: vec(A X B) = (B^T kron A) vec(X).
"""

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .operators import ArrayParams, canonicalize, identity_op, kron, lowering_op

# 4^N above this qubit count is refused by the dense superoperator builder
MAX_QUBITS_DEFAULT = 7

VECTORIZATION = "column-stacking"


class ResourceLimitError(RuntimeError):
    """Requested problem size exceeds the configured memory budget."""


@dataclass(frozen=True)
class Hamiltonian:
    h0: sparse.csr_matrix  # waveguide-induced coupling, non-Hermitian
    v: sparse.csr_matrix   # coherent drive, Hermitian
    total: sparse.csr_matrix


@dataclass(frozen=True)
class Liouvillian:
    params: ArrayParams
    matrix: sparse.csr_matrix  # 4^N x 4^N
    convention: str = field(default=VECTORIZATION)


def vec(x):
    """Column-stacking vectorization of a matrix."""
    return np.asarray(x).ravel(order="F")


def unvec(x, dim):
    return np.asarray(x).reshape(dim, dim, order="F")


def lowering_ops(n_qubits):
    return [lowering_op(m, n_qubits) for m in range(1, n_qubits + 1)]


def build_hamiltonian(params: ArrayParams) -> Hamiltonian:
    n, phi, g, om = params.n_qubits, params.phi, params.gamma_1d, params.omega_r
    sig = lowering_ops(n)
    dim = params.dim
    h0 = sparse.csr_matrix((dim, dim), dtype=complex)
    for m in range(n):
        for k in range(n):
            h0 = h0 + (-1j * g * np.exp(1j * phi * abs(m - k))) * (sig[m].conj().T @ sig[k])
    v = sparse.csr_matrix((dim, dim), dtype=complex)
    sgn = 1.0 if params.drive_from_right else -1.0
    for k in range(n):
        # drive phase for injection from the left (or mirrored); sites are 1-based
        v = v + om * (np.exp(sgn * 1j * phi * (k + 1)) * sig[k].conj().T
                      + np.exp(-sgn * 1j * phi * (k + 1)) * sig[k])
    h0, v = canonicalize(h0), canonicalize(v)
    return Hamiltonian(h0=h0, v=v, total=canonicalize(h0 + v))


def drive_superoperator(params: ArrayParams) -> sparse.csr_matrix:
    """Superoperator of the drive alone: L_V rho = i [rho, V]."""
    v = build_hamiltonian(params).v
    ident = identity_op(params.dim)
    return canonicalize(1j * (kron(v.T, ident) - kron(ident, v)))


def build_liouvillian(params: ArrayParams, max_qubits=MAX_QUBITS_DEFAULT) -> Liouvillian:
    if params.n_qubits > max_qubits:
        raise ResourceLimitError(
            f"N={params.n_qubits} exceeds the dense superoperator budget "
            f"(N <= {max_qubits}); use apply_liouvillian for matrix-free evaluation")
    n, phi, g = params.n_qubits, params.phi, params.gamma_1d
    sig = lowering_ops(n)
    ham = build_hamiltonian(params)
    ident = identity_op(params.dim)
    # -i (H rho - rho H^dag): vec -> -i (I kron H) + i (conj(H) kron I)
    h = ham.total
    mat = kron(ident, -1j * h) + kron(1j * h.conj(), ident)
    for m in range(n):
        for k in range(n):
            c = 2.0 * g * np.cos(phi * (m - k))
            if abs(c) < 1e-15:
                continue
            # sigma_m rho sigma_k^dag: (conj(sigma_k) kron sigma_m)
            mat = mat + c * kron(sig[k].conj(), sig[m])
    return Liouvillian(params=params, matrix=canonicalize(mat))


def apply_liouvillian(params: ArrayParams, rho, _cache={}):
    """Matrix-free evaluation of L rho for a 2^N x 2^N density matrix."""
    rho = np.asarray(rho, dtype=complex)
    key = params
    ops = _cache.get(key)
    if ops is None:
        ham = build_hamiltonian(params)
        sig = lowering_ops(params.n_qubits)
        jumps = []
        n, phi, g = params.n_qubits, params.phi, params.gamma_1d
        dense_sig = [s.toarray() for s in sig]
        for m in range(n):
            for k in range(n):
                c = 2.0 * g * np.cos(phi * (m - k))
                if abs(c) >= 1e-15:
                    jumps.append((c, dense_sig[m], dense_sig[k].conj().T))
        ops = (ham.total.toarray(), jumps)
        if len(_cache) > 16:
            _cache.clear()
        _cache[key] = ops
    h, jumps = ops
    out = -1j * (h @ rho - rho @ h.conj().T)
    for c, a, bdag in jumps:
        out = out + c * (a @ rho @ bdag)
    return out


def dump_liouvillian(liou: Liouvillian, path):
    """Binary dump in the canonical sparse layout, for cross-implementation
    diffing: dims, entry count, then sorted (row, col, re, im) records,
    all little-endian."""
    coo = liou.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    rows, cols, vals = coo.row[order], coo.col[order], coo.data[order]
    with open(path, "wb") as f:
        f.write(struct.pack("<qqq", coo.shape[0], coo.shape[1], coo.nnz))
        rec = np.empty(coo.nnz, dtype=[("r", "<i8"), ("c", "<i8"), ("re", "<f8"), ("im", "<f8")])
        rec["r"], rec["c"] = rows, cols
        rec["re"], rec["im"] = vals.real, vals.imag
        f.write(rec.tobytes())


def load_liouvillian_matrix(path):
    """Read back a matrix written by dump_liouvillian."""
    with open(path, "rb") as f:
        nr, nc, nnz = struct.unpack("<qqq", f.read(24))
        rec = np.frombuffer(f.read(), dtype=[("r", "<i8"), ("c", "<i8"), ("re", "<f8"), ("im", "<f8")])
    if len(rec) != nnz:
        raise ValueError("truncated Liouvillian dump")
    vals = rec["re"] + 1j * rec["im"]
    return canonicalize(sparse.coo_matrix((vals, (rec["r"], rec["c"])), shape=(nr, nc)))
