"""
Monte Carlo sampling of GUE spectra.

Spectra come from the tridiagonal model of the beta = 2 Hermite ensemble,
scaled by 1/(2 sqrt(n)) so that the soft edge sits at 1. The largest
eigenvalue then fluctuates on the scale 2 n^(2/3) (lambda_max - 1), whose
limit law is Tracy-Widom.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal
from scipy.stats import ks_2samp

from painleve_gap.consts import MC_BLOCK_SIZE
from painleve_gap.exceptions import BadParameter
from painleve_gap.painleve import tw_cdf
from painleve_gap.util import thread_count

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.SeedSequence]


@dataclass(frozen=True)
class SpectrumSample:
    """Sorted eigenvalues of one sampled matrix."""

    n: int
    eigenvalues: np.ndarray
    seed: Seed

    def __len__(self) -> int:
        return len(self.eigenvalues)

    @property
    def largest(self) -> float:
        """Largest eigenvalue, -inf for an empty spectrum."""
        if len(self.eigenvalues) == 0:
            return -math.inf
        return float(self.eigenvalues[-1])


def generator(seed: Seed) -> np.random.Generator:
    """Philox generator for a seed or a SeedSequence."""
    return np.random.Generator(np.random.Philox(seed))


def edge_scaling(largest, n: int):
    """2 n^(2/3) (lambda_max - 1)."""
    return 2.0 * n ** (2.0 / 3.0) * (np.asarray(largest) - 1.0)


def tridiagonal_entries(
    n: int, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the scaled beta = 2 tridiagonal model."""
    scale = 1.0 / (2.0 * math.sqrt(n))
    diagonal = rng.standard_normal(n) * scale
    degrees = 2.0 * np.arange(n - 1, 0, -1)
    off_diagonal = np.sqrt(rng.chisquare(degrees) / 2.0) * scale
    return diagonal, off_diagonal


def sample_gue_spectrum(n: int, seed: Seed) -> SpectrumSample:
    """
    Sample the spectrum of an n x n GUE matrix.

    :param n: Matrix size, at least 2
    :type n: int
    :param seed: Seed of the Philox generator
    :type seed: int or numpy.random.SeedSequence
    :return: The scaled spectrum, sorted ascending
    :rtype: SpectrumSample
    :raises BadParameter: if n < 2
    """
    _check_size(n)
    diagonal, off_diagonal = tridiagonal_entries(n, generator(seed))
    return SpectrumSample(n, eigvalsh_tridiagonal(diagonal, off_diagonal), seed)


def sample_dense_gue(n: int, seed: Seed) -> SpectrumSample:
    """Spectrum of a dense Hermitian GUE matrix with the same scaling."""
    _check_size(n)
    rng = generator(seed)
    entries = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    matrix = (entries + entries.conj().T) / 2.0
    eigenvalues = np.linalg.eigvalsh(matrix) / (2.0 * math.sqrt(n))
    return SpectrumSample(n, eigenvalues, seed)


def thin_spectrum(
    sample: SpectrumSample, keep_prob: float, seed: Seed
) -> SpectrumSample:
    """
    Remove every eigenvalue independently with probability 1 - keep_prob.

    :param sample: The spectrum
    :type sample: SpectrumSample
    :param keep_prob: Probability of keeping an eigenvalue
    :type keep_prob: float
    :param seed: Seed of the Philox generator
    :type seed: int
    :return: The thinned spectrum
    :rtype: SpectrumSample
    :raises BadParameter: if keep_prob is not in [0, 1]
    """
    if not 0.0 <= keep_prob <= 1.0:
        raise BadParameter(
            f"keep_prob should be in [0, 1], got {keep_prob}", keep_prob=keep_prob
        )
    kept = generator(seed).random(len(sample)) < keep_prob
    return SpectrumSample(sample.n, sample.eigenvalues[kept], seed)


def sample_lambda_max(
    n: int, n_samples: int, seed: int, threads: Optional[int] = None
) -> np.ndarray:
    """
    Largest eigenvalues of independent GUE matrices.

    Samples are drawn in blocks of fixed size, each block from its own Philox
    stream spawned from one SeedSequence. The result is independent of the
    number of threads.

    :param n: Matrix size
    :type n: int
    :param n_samples: Number of matrices
    :type n_samples: int
    :param seed: Root seed
    :type seed: int
    :param threads: Requested number of worker threads
    :type threads: int
    :return: Largest scaled eigenvalues in sampling order
    :rtype: numpy.ndarray
    """
    _check_size(n)
    if n_samples < 1:
        raise BadParameter(f"Need at least one sample, got {n_samples}")
    sizes = [MC_BLOCK_SIZE] * (n_samples // MC_BLOCK_SIZE)
    if n_samples % MC_BLOCK_SIZE:
        sizes.append(n_samples % MC_BLOCK_SIZE)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    workers = thread_count(threads)
    logger.debug(
        "Sampling %d GUE matrices of size %d in %d blocks on %d threads",
        n_samples,
        n,
        len(sizes),
        workers,
    )
    with ThreadPoolExecutor(max_workers=workers) as executor:
        blocks = list(executor.map(lambda job: _block(n, *job), zip(sizes, streams)))
    return np.concatenate(blocks)


def empirical_cdf(values: Sequence[float], grid: Sequence[float]) -> np.ndarray:
    """Fraction of values less than or equal to each grid point."""
    ordered = np.sort(np.asarray(values, dtype=float))
    positions = np.searchsorted(ordered, np.asarray(grid, dtype=float), side="right")
    return positions / len(ordered)


def ks_distance(values: Sequence[float]) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF and F_TW."""
    ordered = np.sort(np.asarray(values, dtype=float))
    theory = np.array([tw_cdf(float(value)) for value in ordered])
    count = len(ordered)
    above = np.arange(1, count + 1) / count - theory
    below = theory - np.arange(count) / count
    return float(max(above.max(), below.max()))


def edge_cdf_vs_tw(
    n: int,
    n_samples: int,
    seed: int,
    s_grid: Sequence[float],
    threads: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Empirical CDF of 2 n^(2/3) (lambda_max - 1) against F_TW.

    :param n: Matrix size, at least 100
    :type n: int
    :param n_samples: Number of matrices, at least 1000
    :type n_samples: int
    :param seed: Root seed
    :type seed: int
    :param s_grid: Points where both CDFs are reported
    :type s_grid: Sequence[float]
    :param threads: Requested number of worker threads
    :type threads: int
    :return: Empirical CDF, F_TW on the grid and the KS distance over all samples
    :rtype: Tuple[numpy.ndarray, numpy.ndarray, float]
    :raises BadParameter: if n or n_samples is too small
    """
    if n < 100 or n_samples < 1000:
        raise BadParameter(
            f"Edge statistics need n >= 100 and 1000 samples, got {n}, {n_samples}",
            n=n,
            n_samples=n_samples,
        )
    scaled = edge_scaling(sample_lambda_max(n, n_samples, seed, threads), n)
    empirical = empirical_cdf(scaled, s_grid)
    theory = np.array([tw_cdf(float(point)) for point in s_grid])
    distance = ks_distance(scaled)
    logger.info("KS distance of %d samples at n=%d: %.4f", n_samples, n, distance)
    return empirical, theory, distance


def tridiagonal_vs_dense(n: int, n_samples: int, seed: int) -> float:
    """Two-sample KS statistic of lambda_max from both samplers."""
    first, second = np.random.SeedSequence(seed).spawn(2)
    tridiagonal = [
        sample_gue_spectrum(n, child).largest for child in first.spawn(n_samples)
    ]
    dense = [sample_dense_gue(n, child).largest for child in second.spawn(n_samples)]
    return float(ks_2samp(tridiagonal, dense).statistic)


def _block(n: int, size: int, stream: np.random.SeedSequence) -> np.ndarray:
    rng = generator(stream)
    largest = np.empty(size)
    for index in range(size):
        diagonal, off_diagonal = tridiagonal_entries(n, rng)
        largest[index] = eigvalsh_tridiagonal(
            diagonal, off_diagonal, select="i", select_range=(n - 1, n - 1)
        )[0]
    return largest


def _check_size(n: int):
    if n < 2:
        raise BadParameter(f"Matrix size should be at least 2, got {n}", n=n)
