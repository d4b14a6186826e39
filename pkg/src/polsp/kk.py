"""Susceptibility models and numerical Kramers-Kronig transforms.

Two model variants exist.  A lorentz set is a finite list of lossless
species (omega_j, G_j) whose real susceptibility is the exact closed form

    chi'(Omega) = sum_j G_j^2 / (omega_j^2 - Omega^2);

its imaginary part is a sum of delta weights and is never put on a grid.
A sampled model carries the distributional weight density G^2(omega) >= 0
on an ascending grid and evaluates chi' through a principal-value
integral.

All PV integrals use singularity subtraction: the numerator is shifted by
its value at the pole, the remainder is an ordinary trapezoid integral,
and the subtracted part is integrated analytically.  Plain quadrature
across a PV pole does not converge; this split does, at the cost of the
edge caveat below.

Finite grids truncate an intrinsically global transform.  When the input
has significant weight at the grid edges, the output is biased there; the
transforms emit TruncatedSpectrumWarning and attach an order-of-magnitude
tail estimate instead of returning silently.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GridError, ParseError, PoleError, TruncatedSpectrumWarning
from .model import CavityConfig, OscillatorSpecies

_EDGE_WEIGHT_RTOL = 1e-3  # relative edge magnitude that triggers the warning


# --------------------------------------------------------------------------
# models
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LorentzSet:
    """Finite set of lossless oscillator species."""

    species: tuple[OscillatorSpecies, ...]

    @classmethod
    def from_config(cls, config: CavityConfig) -> LorentzSet:
        return cls(species=tuple(config.oscillators))

    def poles(self) -> tuple[float, ...]:
        return tuple(sp.omega for sp in self.species)

    def chi_prime(self, omega: float) -> float:
        total = 0.0
        for sp in self.species:
            den = sp.omega ** 2 - omega ** 2
            if den == 0.0:
                raise PoleError(f"chi' evaluated at resonance omega={sp.omega}")
            total += sp.G ** 2 / den
        return total


def _check_grid(grid: np.ndarray) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2:
        raise GridError(f"grid must be a 1-D array of >= 2 nodes, got shape {grid.shape}")
    if np.any(np.diff(grid) <= 0.0):
        raise GridError("grid must be strictly ascending")
    if grid[0] < 0.0:
        raise GridError("grid frequencies must be nonnegative")
    return grid


@dataclass(frozen=True)
class SampledSusceptibility:
    """Weight density G^2(omega) sampled on an ascending frequency grid."""

    grid: np.ndarray
    weight: np.ndarray

    def __post_init__(self) -> None:
        grid = _check_grid(self.grid)
        weight = np.asarray(self.weight, dtype=float)
        if weight.shape != grid.shape:
            raise GridError(
                f"weight shape {weight.shape} does not match grid {grid.shape}")
        if np.any(weight < 0.0):
            raise GridError("sampled weight G^2(omega) must be nonnegative")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "weight", weight)
        self.grid.flags.writeable = False
        self.weight.flags.writeable = False

    def chi_prime(self, omega: float) -> float:
        return _pv_integral(self.grid, self.weight, float(omega))


def chi_prime(model, omega: float) -> float:
    """Real susceptibility of either model variant at one frequency."""
    return model.chi_prime(omega)


# --------------------------------------------------------------------------
# principal-value machinery
# --------------------------------------------------------------------------

def _pv_kernel_antiderivative(a: float, b: float, omega: float, spacing: float) -> float:
    # PV integral of 1/(w^2 - omega^2) over [a, b].  At an edge pole the
    # true PV diverges logarithmically; the cutoff of half a grid spacing
    # is the resolution the discrete data supports, and the caller warns.
    if omega == 0.0:
        return 1.0 / a - 1.0 / b if a > 0.0 else np.inf
    ga = max(abs(a - omega), 0.5 * spacing)
    gb = max(abs(b - omega), 0.5 * spacing)
    return (1.0 / (2.0 * omega)) * np.log((gb * (a + omega)) / ((b + omega) * ga))


def _tail_kernel_integral(b: float, omega: float, f_b: float, spacing: float) -> float:
    # integral of f(b) (b/w)^2 / (w^2 - omega^2) over [b, inf), the
    # inverse-square continuation of the last sample.  Its log term cancels
    # the edge divergence of the support PV exactly, so the combined
    # transform stays bounded as omega approaches the grid edge.
    if omega == 0.0:
        return f_b / (3.0 * b)
    gap = max(b - omega, 0.5 * spacing)
    bracket = np.log((b + omega) / gap) / (2.0 * omega) - 1.0 / b
    return f_b * (b / omega) ** 2 * bracket


def _pv_integral(grid: np.ndarray, numerator: np.ndarray, omega: float,
                 tail_model: bool = False) -> float:
    """PV integral of numerator(w)/(w^2 - omega^2) over the grid support.

    Inside the support the pole is subtracted and integrated analytically;
    outside, the integrand is regular and the plain trapezoid applies.
    With tail_model the numerator is continued past the last node with an
    inverse-square falloff and that tail is integrated in closed form.
    Sampled oscillator densities are compactly supported by definition and
    must not use it; globally supported response functions must, or the
    truncated transform develops a log spike against the upper edge.
    """
    a, b = grid[0], grid[-1]
    den = grid ** 2 - omega ** 2
    if omega < a or omega > b:
        return float(np.trapezoid(numerator / den, grid))

    k = int(np.argmin(np.abs(grid - omega)))
    exact_node = abs(grid[k] - omega) <= 1e-14 * max(1.0, omega)
    if exact_node:
        f_at = numerator[k]
    else:
        f_at = float(np.interp(omega, grid, numerator))

    reduced = numerator - f_at
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = reduced / den
    # repair the removable singularity: limit is f'(omega)/(2 omega)
    bad = ~np.isfinite(integrand) | (np.abs(grid - omega) <= 1e-14 * max(1.0, omega))
    if np.any(bad):
        idx = np.where(bad)[0]
        for i in idx:
            if omega > 0.0 and 0 < i < len(grid) - 1:
                deriv = (numerator[i + 1] - numerator[i - 1]) / (grid[i + 1] - grid[i - 1])
                integrand[i] = deriv / (2.0 * omega)
            elif omega > 0.0 and i in (0, len(grid) - 1):
                j = 1 if i == 0 else len(grid) - 2
                deriv = (numerator[j] - numerator[i]) / (grid[j] - grid[i])
                integrand[i] = deriv / (2.0 * omega)
            else:
                # omega = 0 at the first node: copy the neighboring value
                integrand[i] = integrand[i + 1] if i + 1 < len(grid) else 0.0
    if not np.all(np.isfinite(integrand)):
        raise GridError("PV integrand not finite after subtraction")

    spacing = float(np.min(np.diff(grid)))
    tail = 0.0
    if f_at != 0.0:
        tail = f_at * _pv_kernel_antiderivative(a, b, omega, spacing)
        if not np.isfinite(tail):
            raise GridError(f"PV kernel integral diverges at omega={omega}")
    if tail_model and numerator[-1] != 0.0 and b > 0.0:
        tail += _tail_kernel_integral(b, omega, float(numerator[-1]), spacing)
    return float(np.trapezoid(integrand, grid) + tail)


# --------------------------------------------------------------------------
# Kramers-Kronig transforms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class KKResult:
    """Transformed samples plus the truncation-bias estimate."""

    grid: np.ndarray
    values: np.ndarray
    tail_estimate: float


def _edge_warning(grid: np.ndarray, values: np.ndarray, label: str) -> None:
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        return
    # a grid that starts at zero covers the whole half line on that side,
    # so only weight stranded at a truncated edge signals bias
    edge = abs(float(values[-1]))
    if grid[0] > 0.0:
        edge = max(edge, abs(float(values[0])))
    if edge > _EDGE_WEIGHT_RTOL * scale:
        warnings.warn(
            f"{label} has weight {edge:.3g} at the grid edge (scale {scale:.3g}); "
            "the finite-support transform is biased there",
            TruncatedSpectrumWarning, stacklevel=3)


def _tail_estimate(grid: np.ndarray, numerator: np.ndarray) -> float:
    # neglected tail approximated by continuing the last numerator value
    # with a 1/w^2 falloff: int_b^inf |f(b)| (b/w)^2 / w^2 dw ~ |f(b)| / b
    b = grid[-1]
    return float(abs(numerator[-1]) / b) if b > 0 else 0.0


def kk_forward(grid: np.ndarray, chi_imag: np.ndarray) -> KKResult:
    """chi'(Omega) = (2/pi) PV int w chi''(w) / (w^2 - Omega^2) dw."""
    grid = _check_grid(grid)
    chi_imag = np.asarray(chi_imag, dtype=float)
    if chi_imag.shape != grid.shape:
        raise GridError("sample shape does not match grid")
    _edge_warning(grid, chi_imag, "chi''")
    numerator = grid * chi_imag
    out = np.array([(2.0 / np.pi) * _pv_integral(grid, numerator, w, tail_model=True)
                    for w in grid])
    return KKResult(grid=grid, values=out,
                    tail_estimate=(2.0 / np.pi) * _tail_estimate(grid, numerator))


def kk_inverse(grid: np.ndarray, chi_real: np.ndarray) -> KKResult:
    """chi''(Omega) = -(2 Omega/pi) PV int chi'(w) / (w^2 - Omega^2) dw."""
    grid = _check_grid(grid)
    chi_real = np.asarray(chi_real, dtype=float)
    if chi_real.shape != grid.shape:
        raise GridError("sample shape does not match grid")
    _edge_warning(grid, chi_real, "chi'")
    out = np.empty_like(chi_real)
    for k, w in enumerate(grid):
        if w == 0.0:
            out[k] = 0.0  # the odd prefactor wins at zero frequency
            continue
        out[k] = -(2.0 * w / np.pi) * _pv_integral(grid, chi_real, w, tail_model=True)
    scale = float(grid[-1])
    return KKResult(grid=grid, values=out,
                    tail_estimate=(2.0 * scale / np.pi) * _tail_estimate(grid, chi_real))


# --------------------------------------------------------------------------
# discretization and file formats
# --------------------------------------------------------------------------

def species_from_grid(model: SampledSusceptibility) -> tuple[OscillatorSpecies, ...]:
    """Map a sampled weight density onto discrete species.

    Trapezoid nodes become resonances and trapezoid weights become squared
    couplings: omega_j = w_j, G_j^2 = weight_j * G^2(w_j).  This is one
    quadrature choice among many, recorded rather than canonical; a zero
    first node is dropped because species frequencies are strictly
    positive.
    """
    grid, g2 = model.grid, model.weight
    w = np.empty_like(grid)
    w[1:-1] = 0.5 * (grid[2:] - grid[:-2])
    w[0] = 0.5 * (grid[1] - grid[0])
    w[-1] = 0.5 * (grid[-1] - grid[-2])
    out = []
    for node, weight, density in zip(grid, w, g2):
        if node <= 0.0:
            continue
        out.append(OscillatorSpecies(omega=float(node), G=float(np.sqrt(weight * density))))
    return tuple(out)


def load_samples(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column (omega, value) text file with '#' comments."""
    path = Path(path)
    try:
        data = np.loadtxt(path, comments="#", ndmin=2)
    except (OSError, ValueError) as exc:
        raise ParseError(f"cannot read samples from {path}: {exc}") from exc
    if data.shape[1] != 2:
        raise ParseError(f"{path} must have exactly two columns, found {data.shape[1]}")
    grid = _check_grid(data[:, 0])
    return grid, data[:, 1].copy()


def save_samples(path, grid: np.ndarray, values: np.ndarray, comment: str = "") -> None:
    """Write samples in the same two-column format the loader accepts."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        for w, v in zip(grid, values):
            fh.write(f"{w:.11e} {v:.11e}\n")
