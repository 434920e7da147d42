"""Singular value decomposition with fixed signs, hard thresholding, and rank rules.

The denoising step of every estimator in this package is hard singular value
thresholding (HSVT): keep the top r singular triplets and drop the rest. The
rank r either comes from a fixed request or from an energy rule on the
cumulative singular value mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSpectrumError,
    InvalidInputError,
    InvalidRankError,
    ShapeError,
)

# Singular values below ZERO_SIGMA_RTOL * sigma_1 count as numerically zero.
ZERO_SIGMA_RTOL = 1e-12
# Slack when comparing a cumulative ratio against an energy threshold, so that
# exact-in-theory boundaries like 9/10 >= 0.9 survive float rounding.
ENERGY_TIE_TOL = 1e-12


def as_matrix(x) -> np.ndarray:
    """Validate and return a finite, nonempty 2-d float array."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got {x.ndim} dimension(s)")
    if x.shape[0] == 0 or x.shape[1] == 0:
        raise ShapeError(f"matrix must be nonempty, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("matrix contains NaN or infinite entries")
    return x


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD x = u @ diag(sigma) @ v.T with a deterministic sign convention.

    u is (n, p), sigma is (p,) nonincreasing and nonnegative, v is (T, p),
    with p = min(n, T). Each column of v has a nonnegative first nonzero
    coordinate; the matching column of u is flipped jointly so the product is
    unchanged.
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.T

    def low_rank(self, r: int) -> np.ndarray:
        """Reconstruction from the leading r singular triplets."""
        if not 1 <= r <= self.sigma.size:
            raise InvalidRankError(
                f"rank must be in 1..{self.sigma.size}, got {r}"
            )
        return (self.u[:, :r] * self.sigma[:r]) @ self.v[:, :r].T


def svd(x) -> SvdFactors:
    """Thin SVD of a finite matrix, signs fixed for reproducibility."""
    x = as_matrix(x)
    u, sigma, vh = np.linalg.svd(x, full_matrices=False)
    v = vh.T
    for j in range(v.shape[1]):
        col = v[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        # v columns are unit vectors, so nz is empty only for exact zeros,
        # which LAPACK does not produce; guard anyway.
        if nz.size and col[nz[0]] < 0:
            v[:, j] = -col
            u[:, j] = -u[:, j]
    return SvdFactors(u=u, sigma=sigma, v=v)


def hsvt(x, r: int) -> np.ndarray:
    """Hard singular value thresholding: best rank-r approximation of x."""
    x = as_matrix(x)
    if not 1 <= r <= min(x.shape):
        raise InvalidRankError(f"rank must be in 1..{min(x.shape)}, got {r}")
    return svd(x).low_rank(r)


def numerical_rank(sigma) -> int:
    """Count of singular values above ZERO_SIGMA_RTOL times the largest."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.size == 0 or sigma[0] <= 0:
        return 0
    return int(np.count_nonzero(sigma > ZERO_SIGMA_RTOL * sigma[0]))


@dataclass(frozen=True)
class RankRule:
    """How to pick the HSVT rank from a spectrum.

    kind "fixed" uses the requested r directly; kind "energy" picks the
    smallest r whose cumulative singular value ratio reaches the threshold.
    By default the ratio is over plain singular values, matching a cumulative
    singular value plot; squared=True uses squared values instead.
    """

    kind: str
    r: int | None = None
    threshold: float | None = None
    squared: bool = False

    @classmethod
    def fixed(cls, r: int) -> "RankRule":
        if not isinstance(r, (int, np.integer)) or r < 1:
            raise InvalidRankError(f"fixed rank must be a positive integer, got {r!r}")
        return cls(kind="fixed", r=int(r))

    @classmethod
    def energy(cls, threshold: float, squared: bool = False) -> "RankRule":
        if not 0.0 < threshold <= 1.0:
            raise InvalidRankError(
                f"energy threshold must be in (0, 1], got {threshold!r}"
            )
        return cls(kind="energy", threshold=float(threshold), squared=squared)


def select_rank(sigma, rule: RankRule) -> int:
    """Apply a rank rule to a nonincreasing spectrum."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 1 or sigma.size == 0:
        raise ShapeError("sigma must be a nonempty 1-d array")
    if rule.kind == "fixed":
        if rule.r > sigma.size:
            raise InvalidRankError(
                f"fixed rank {rule.r} exceeds spectrum length {sigma.size}"
            )
        return rule.r
    if rule.kind == "energy":
        vals = sigma**2 if rule.squared else sigma
        total = vals.sum()
        if total <= 0:
            raise DegenerateSpectrumError(
                "all singular values are zero; energy rule undefined"
            )
        ratios = np.cumsum(vals) / total
        return int(np.argmax(ratios >= rule.threshold - ENERGY_TIE_TOL)) + 1
    raise InvalidRankError(f"unknown rank rule kind {rule.kind!r}")


def spectrum_report(x) -> list[tuple[int, float, float]]:
    """Rows (index, sigma_i, cumulative ratio) for the spectrum of x.

    Indices are 1-based and the final cumulative ratio is exactly 1. An
    all-zero matrix has no meaningful ratios and raises
    DegenerateSpectrumError.
    """
    sigma = svd(x).sigma
    cum = np.cumsum(sigma)
    total = cum[-1]
    if total <= 0:
        raise DegenerateSpectrumError("all singular values are zero")
    return [
        (i + 1, float(sigma[i]), float(cum[i] / total)) for i in range(sigma.size)
    ]
