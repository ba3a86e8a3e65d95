"""Complex-exponential probe pairs for one Fourier mode.

For a target frequency vector xi != 0, wavenumber k and attenuation b >= 0,
let e1 = xi/|xi| and e2 = e1 rotated by +90 degrees, and put

    mu   = sqrt(k^2 - |xi|^2/4 - i k b)          (principal branch, Re mu >= 0)
    zeta      = (|xi|/2) e1 + mu e2
    zeta_star = (|xi|/2) e1 - mu e2.

Then zeta.zeta = zeta_star.zeta_star = k^2 - i k b (bilinear dot product, no
conjugation), so u0(x) = exp(i zeta.x) and v(x) = exp(i zeta_star.x) both
solve the constant-coefficient equation -Lap u - k^2 u + i k b u = 0, while
their product is exactly the Fourier kernel:

    u0(x) v(x) = exp(i xi.x),        zeta + zeta_star = xi.

Without attenuation the pair is propagating (real vectors of length k) for
|xi| <= 2k and evanescent for |xi| > 2k, where mu = i Xi with
Xi = sqrt(|xi|^2/4 - k^2) and the probes grow/decay like exp(+-Xi |x.e2|).

With attenuation write mu = X + i Y, X > 0.  The imaginary part Y < 0 is
small in the propagating band (|Y| <= b when |xi|^2 <= 3 k^2) and approaches
the unattenuated evanescence rate for large |xi|; ``attenuated_Y`` exposes it
together with the closed form valid for |xi|^2 > 4 k^2:

    Y = -(1/2) sqrt( (|xi|^2/2 - 2 k^2) + sqrt( (|xi|^2/2 - 2 k^2)^2 + 4 k^2 b^2 ) ).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDirectionError

__all__ = [
    "WaveVectorPair",
    "make_wave_pair",
    "eval_probe",
    "neumann_of_probe",
    "attenuated_Y",
]


@dataclass(frozen=True)
class WaveVectorPair:
    """The two complex wave vectors probing one frequency xi = kappa * e1."""

    xi: tuple[float, float]
    k: float
    b: float
    e1: tuple[float, float]
    e2: tuple[float, float]
    mu: complex
    zeta: tuple[complex, complex]
    zeta_star: tuple[complex, complex]

    @property
    def kappa(self) -> float:
        """|xi|."""
        x1, x2 = self.xi
        return float(np.hypot(x1, x2))

    @property
    def evanescent(self) -> bool:
        """True when the unattenuated pair would grow exponentially (|xi| > 2k)."""
        return self.kappa > 2.0 * self.k


def _principal_mu(kappa: float, k: float, b: float) -> complex:
    # Positive zero for the imaginary part when b == 0: sqrt(-x - 0.0j) would
    # land on the conjugate branch and flip the evanescent sign.
    z = complex(k * k - 0.25 * kappa * kappa, -(k * b) if b > 0.0 else 0.0)
    mu = complex(np.sqrt(np.complex128(z)))
    return mu


def make_wave_pair(xi, k: float, b: float = 0.0) -> WaveVectorPair:
    """Construct the probe pair for frequency vector ``xi``.

    Raises
    ------
    DegenerateDirectionError
        If ``xi`` is the zero vector (no direction to split along).
    ValueError
        If ``k <= 0`` or ``b < 0``.
    """
    x1, x2 = float(xi[0]), float(xi[1])
    kappa = float(np.hypot(x1, x2))
    if kappa == 0.0:
        raise DegenerateDirectionError("xi must be nonzero; the zero mode has no probe")
    if k <= 0.0:
        raise ValueError(f"wavenumber k must be positive, got {k}")
    if b < 0.0:
        raise ValueError(f"attenuation b must be nonnegative, got {b}")

    e1 = (x1 / kappa, x2 / kappa)
    e2 = (-e1[1], e1[0])                      # +90 degree rotation
    mu = _principal_mu(kappa, k, b)

    half = 0.5 * kappa
    zeta = (half * e1[0] + mu * e2[0], half * e1[1] + mu * e2[1])
    zeta_star = (half * e1[0] - mu * e2[0], half * e1[1] - mu * e2[1])
    return WaveVectorPair(
        xi=(x1, x2), k=float(k), b=float(b), e1=e1, e2=e2,
        mu=mu, zeta=zeta, zeta_star=zeta_star,
    )


def _plane_wave(vec: tuple[complex, complex], points: np.ndarray) -> np.ndarray:
    phase = points[:, 0] * vec[0] + points[:, 1] * vec[1]
    return np.exp(1j * phase)


def eval_probe(pair: WaveVectorPair, points: np.ndarray, which: str = "u0") -> np.ndarray:
    """Evaluate u0 = exp(i zeta.x) or v = exp(i zeta*.x) at an (m, 2) array."""
    points = np.asarray(points, dtype=float)
    if which == "u0":
        return _plane_wave(pair.zeta, points)
    if which == "v":
        return _plane_wave(pair.zeta_star, points)
    raise ValueError(f"which must be 'u0' or 'v', got {which!r}")


def neumann_of_probe(
    pair: WaveVectorPair, points: np.ndarray, normals: np.ndarray, which: str = "u0"
) -> np.ndarray:
    """Exact normal derivative i (vec.nu) exp(i vec.x) of a probe field."""
    points = np.asarray(points, dtype=float)
    normals = np.asarray(normals, dtype=float)
    vec = pair.zeta if which == "u0" else pair.zeta_star
    if which not in ("u0", "v"):
        raise ValueError(f"which must be 'u0' or 'v', got {which!r}")
    vdotn = normals[:, 0] * vec[0] + normals[:, 1] * vec[1]
    return 1j * vdotn * _plane_wave(vec, points)


def attenuated_Y(xi_norm: float, k: float, b: float) -> float:
    """Imaginary part Y of mu = X + i Y for an attenuated probe (b > 0).

    Y is always negative; |Y| <= b whenever |xi|^2 <= 3 k^2, and for
    |xi|^2 > 4 k^2 it equals the closed form quoted in the module docstring.
    """
    if k <= 0.0:
        raise ValueError(f"wavenumber k must be positive, got {k}")
    if b <= 0.0:
        raise ValueError(f"attenuated_Y needs b > 0, got {b}")
    if xi_norm < 0.0:
        raise ValueError(f"|xi| must be nonnegative, got {xi_norm}")
    return float(_principal_mu(float(xi_norm), k, b).imag)
