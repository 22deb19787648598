"""Independent reference computations used to freeze expected values."""
import numpy as np
from scipy import sparse
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply


def _ladder(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), 1)


def fock_sideband_variance(alpha_plus, alpha_minus, r, theta, dim=30):
    """<X^dag X> for X = a e^{i theta} + b^dag e^{-i theta} by brute force.

    ``a`` is the +omega sideband and ``b`` the -omega sideband. The state is
    D_a(alpha_plus) D_b(alpha_minus) S2(r) |0, 0> in a truncated two-mode Fock
    space, with S2 = exp(r (a b - a^dag b^dag)).
    """
    lad = _ladder(dim)
    eye = np.eye(dim)
    a = sparse.csr_matrix(np.kron(lad, eye))
    b = sparse.csr_matrix(np.kron(eye, lad))
    ad, bd = a.conj().T, b.conj().T
    vac = np.zeros(dim * dim, dtype=complex)
    vac[0] = 1.0
    psi = expm_multiply(r * (a @ b - ad @ bd), vac) if r else vac
    d_a = expm(alpha_plus * lad.T - np.conj(alpha_plus) * lad)
    d_b = expm(alpha_minus * lad.T - np.conj(alpha_minus) * lad)
    psi = np.kron(d_a, d_b) @ psi
    x_psi = a @ psi * np.exp(1j * theta) + bd @ psi * np.exp(-1j * theta)
    return float(np.vdot(x_psi, x_psi).real)
