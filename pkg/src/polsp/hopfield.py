"""Assembly and diagonalization of the coupled light-matter mode equations.

The quadratic Hamiltonian of N photon modes and S*Xi matter modes yields,
for the coefficient vector v = (W, Xt, Y, Zt), a first-order eigenproblem
Omega v = M v of dimension 2(N + S*Xi).  The tilde variables absorb a phase
(Xt = i X, Zt = i Z) so that every entry of M is real.

With P = diag(Omega_m), R = diag(omega_j) per matter coordinate,
E[m,k] = (1/2) (sum_j G_j^2) D[m,k] / sqrt(Omega_m Omega_k) and
C[m,(j,xi)] = (1/2) G_j sqrt(omega_j / Omega_m) K[m,xi], the blocks read

    M = [[ P+E,  C,  -E,     C ],
         [ C^T,  R,  -C^T,   0 ],
         [ E,    C,  -(P+E), C ],
         [-C^T,  0,   C^T,  -R ]].

The minus signs in the Zt row are forced by consistency: eliminating the
matter coordinates from Omega v = M v must reproduce the secular relation
with coupling weight Omega^2 / (omega_j^2 - Omega^2), and only this sign
assignment does.  The metric eta = diag(+1, -1) over the (W, Xt | Y, Zt)
split makes eta M symmetric, which is what guarantees the +-Omega pairing
and the eta-orthogonality of eigenvectors across distinct eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError, NormalizationError
from .model import CavityConfig, validate
from .modes import OverlapSet, overlap_K, photon_frequencies

# relative scales for eigenvalue classification
_ZERO_MODE_RTOL = 1e-12
_PAIRING_RTOL = 1e-10
_CLUSTER_RTOL = 1e-9


@dataclass(frozen=True)
class DynamicalMatrix:
    """The real first-order evolution matrix plus its block bookkeeping."""

    matrix: np.ndarray
    photon_mode_count: int
    species_count: int
    exciton_mode_count: int
    q: float

    def __post_init__(self) -> None:
        self.matrix.flags.writeable = False

    @property
    def half_dim(self) -> int:
        return self.photon_mode_count + self.species_count * self.exciton_mode_count


@dataclass(frozen=True)
class PolaritonMode:
    """One positive-frequency polariton eigenmode.

    W, Y are the photon-like coefficient vectors; X, Z the matter-like
    ones with the i-phase of the tilde convention restored, so X and Z are
    purely imaginary.  The boson normalization is

        sum(|W|^2 - |Y|^2) + sum(|X|^2 - |Z|^2) = 1.
    """

    Omega: float
    W: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    q: float

    def symplectic_norm(self) -> float:
        return float(np.sum(np.abs(self.W) ** 2) - np.sum(np.abs(self.Y) ** 2)
                     + np.sum(np.abs(self.X) ** 2) - np.sum(np.abs(self.Z) ** 2))


def build_dynamical_matrix(config: CavityConfig, overlaps: OverlapSet, q) -> DynamicalMatrix:
    """Assemble the 2(N + S*Xi) evolution matrix at in-plane wavenumber q."""
    validate(config)
    overlaps.check_shape(config)
    n = config.photon_mode_count
    s = config.species_count()
    xi = config.exciton_mode_count
    qv = float(q)

    om_phot = photon_frequencies(config, qv)
    om_spec = np.array([sp.omega for sp in config.oscillators])
    g_spec = np.array([sp.G for sp in config.oscillators])

    sqrt_phot = np.sqrt(om_phot)
    E = 0.5 * np.sum(g_spec ** 2) * overlaps.D / np.outer(sqrt_phot, sqrt_phot)

    # C is N x (S Xi), species blocks side by side
    C = np.empty((n, s * xi))
    for j in range(s):
        C[:, j * xi:(j + 1) * xi] = (
            0.5 * g_spec[j] * np.sqrt(om_spec[j]) / sqrt_phot[:, None] * overlaps.K)

    P = np.diag(om_phot)
    R = np.diag(np.repeat(om_spec, xi))
    Zb = np.zeros((s * xi, s * xi))

    M = np.block([
        [P + E, C, -E, C],
        [C.T, R, -C.T, Zb],
        [E, C, -(P + E), C],
        [-C.T, Zb, C.T, -R],
    ])
    if M.shape != (2 * (n + s * xi),) * 2:
        raise DimensionError(f"assembled matrix has shape {M.shape}")
    return DynamicalMatrix(matrix=M, photon_mode_count=n, species_count=s,
                           exciton_mode_count=xi, q=qv)


def _eta_vector(half_dim: int) -> np.ndarray:
    return np.concatenate([np.ones(half_dim), -np.ones(half_dim)])


def _deterministic_orientation(v: np.ndarray) -> np.ndarray:
    # fix the arbitrary eigenvector sign: dominant coefficient positive,
    # first index winning ties
    k = int(np.argmax(np.abs(v)))
    return -v if v[k] < 0 else v


def diagonalize(dyn: DynamicalMatrix) -> list[PolaritonMode]:
    """Return all positive-frequency modes, boson-normalized, sorted by Omega.

    Raises NormalizationError when the spectrum is not real and paired or a
    mode fails to have positive symplectic norm; either signals an unstable
    parameter set or an assembly bug, and neither is silently accepted.
    """
    M = dyn.matrix
    try:
        eigvals, eigvecs = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed: {exc}") from exc

    scale = float(np.max(np.abs(eigvals))) or 1.0
    if np.max(np.abs(eigvals.imag)) > 1e-9 * scale:
        raise NormalizationError(
            "complex eigenfrequencies: quadratic form is not positive definite")
    vals = eigvals.real
    if np.max(np.abs(eigvecs.imag)) > 1e-7:
        raise NormalizationError("eigenvectors not real up to tolerance")
    vecs = eigvecs.real

    if np.min(np.abs(vals)) < _ZERO_MODE_RTOL * scale:
        raise NormalizationError("zero-frequency mode encountered")

    pos = np.where(vals > 0)[0]
    neg = np.where(vals < 0)[0]
    if len(pos) != dyn.half_dim or len(neg) != dyn.half_dim:
        raise NormalizationError(
            f"expected {dyn.half_dim} positive modes, found {len(pos)}")
    pos_sorted = np.sort(vals[pos])
    neg_sorted = np.sort(-vals[neg])
    if np.max(np.abs(pos_sorted - neg_sorted) / pos_sorted) > _PAIRING_RTOL:
        raise NormalizationError("eigenvalues do not occur in +-Omega pairs")

    order = pos[np.argsort(vals[pos])]
    omegas = vals[order]
    V = vecs[:, order]
    eta = _eta_vector(dyn.half_dim)

    # eta-orthonormalize cluster by cluster; eigenvectors of distinct
    # eigenvalues are automatically eta-orthogonal because eta M = (eta M)^T
    normalized = np.empty_like(V)
    start = 0
    while start < len(omegas):
        stop = start + 1
        while stop < len(omegas) and omegas[stop] - omegas[stop - 1] <= _CLUSTER_RTOL * omegas[stop]:
            stop += 1
        block = V[:, start:stop]
        gram = block.T @ (eta[:, None] * block)
        gram = 0.5 * (gram + gram.T)
        try:
            chol = np.linalg.cholesky(gram)
        except np.linalg.LinAlgError as exc:
            raise NormalizationError(
                f"symplectic norm not positive near Omega={omegas[start]:.6g}") from exc
        block = block @ np.linalg.inv(chol).T
        # deterministic order inside a degenerate cluster: dominant
        # coordinate index, ties by incoming order
        dominant = np.argmax(np.abs(block), axis=0)
        block = block[:, np.argsort(dominant, kind="stable")]
        for k in range(block.shape[1]):
            block[:, k] = _deterministic_orientation(block[:, k])
        normalized[:, start:stop] = block
        start = stop

    n = dyn.photon_mode_count
    half = dyn.half_dim
    modes = []
    for k in range(len(omegas)):
        v = normalized[:, k]
        mode = PolaritonMode(
            Omega=float(omegas[k]),
            W=v[:n].copy(),
            X=-1j * v[n:half],
            Y=v[half:half + n].copy(),
            Z=-1j * v[half + n:],
            q=dyn.q)
        norm = mode.symplectic_norm()
        if abs(norm - 1.0) > 1e-8:
            raise NormalizationError(f"mode at Omega={mode.Omega:.6g} has norm {norm}")
        modes.append(mode)
    return modes


def spectrum(config: CavityConfig, q) -> np.ndarray:
    """Sorted positive eigenfrequencies at q; convenience composition."""
    overlaps = overlap_K(config)
    dyn = build_dynamical_matrix(config, overlaps, q)
    return np.array([mode.Omega for mode in diagonalize(dyn)])
