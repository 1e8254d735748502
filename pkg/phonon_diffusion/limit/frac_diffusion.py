# Global imports
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from phonon_diffusion.limit.symbols import ALPHA, KappaSet

SLAVING_POWER = 3.0 / 5.0
TEMPERATURE_POWER = 6.0 / 5.0


class SpectrumSymmetryError(ValueError):
    """A spectrum handed to the real-space renderer is not conjugate symmetric."""


@dataclass(frozen=True)
class DiffusionParams:
    kappas: KappaSet
    T_bar: float = 1.0

    def __post_init__(self) -> None:
        if not self.T_bar > 0.0:
            raise ValueError(f"T_bar must be positive, got {self.T_bar}")
        if not self.kappas.kappa_eff > 0.0:
            raise ValueError("effective diffusivity must be positive")

    @property
    def kappa_eff(self) -> float:
        return self.kappas.kappa_eff

    @property
    def rate(self) -> float:
        """kappa / T_bar^(6/5), the coefficient of |xi|^(8/5)."""
        return self.kappa_eff / self.T_bar**TEMPERATURE_POWER


def wave_numbers(modes: int, box_length: float) -> np.ndarray:
    """xi_j = 2 pi j / Lx in numpy FFT order."""
    return 2.0 * np.pi * np.fft.fftfreq(modes, d=box_length / modes)


def evolve_hat(params: DiffusionParams, T0_hat: np.ndarray, xi: np.ndarray, t: float) -> np.ndarray:
    """Exact solution of d/dt T + kappa/T_bar^(6/5) (-Laplacian)^(4/5) T = 0."""
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return np.exp(-params.rate * np.abs(xi) ** ALPHA * t) * T0_hat


def slaved_S_hat(kappas: KappaSet, T_hat: np.ndarray, xi: np.ndarray, sign: int = -1) -> np.ndarray:
    """S = sign (kappa2 / kappa3) |xi|^(3/5) T."""
    if sign not in (-1, 1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    return sign * kappas.kappa2 / kappas.kappa3 * np.abs(xi) ** SLAVING_POWER * T_hat


def forward_transform(samples: np.ndarray, box_length: float) -> np.ndarray:
    """Fourier coefficients of a periodic field sampled on x_m = m Lx / M.

    Normalized so that a mode e^{i xi_j x} has coefficient 1.
    """
    if not box_length > 0.0:
        raise ValueError(f"box length must be positive, got {box_length}")
    samples = np.asarray(samples)
    return np.fft.fft(samples, axis=0) / samples.shape[0]


def real_space_render(field_hat: np.ndarray, box_length: float, atol: float = 1e-12) -> np.ndarray:
    """Inverse of forward_transform for conjugate-symmetric spectra."""
    field_hat = np.asarray(field_hat)
    modes = field_hat.shape[0]
    mirrored = np.conj(field_hat[(-np.arange(modes)) % modes])
    scale = max(float(np.max(np.abs(field_hat), initial=0.0)), 1.0)
    defect = float(np.max(np.abs(field_hat - mirrored), initial=0.0))
    if defect > atol * scale:
        raise SpectrumSymmetryError(
            f"spectrum is not conjugate symmetric (defect {defect:.3e}), field would be complex"
        )
    logging.debug(f"Rendering {modes} modes on a box of length {box_length}")
    return np.real(np.fft.ifft(field_hat, axis=0) * modes)


def x_grid(modes: int, box_length: float) -> np.ndarray:
    return np.arange(modes) * box_length / modes
