"""Centered random variables: densities, reproducible sampling and sums of iid copies.

Sampling uses numpy's counter-based Philox generator. A request for `count` draws is cut
into blocks of SAMPLE_BLOCK_SIZE, block i draws from the stream keyed by (seed, i), and
blocks are concatenated in index order. The result therefore does not depend on how many
workers produced the blocks."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import special

from gls_bounds.data_models import RandomVariableModel, SampleSet, SumModel
from gls_bounds.exceptions import DomainError, UnsupportedKindError
from gls_bounds.models.constants import (
    MAX_ENUMERATED_OUTCOMES,
    SAMPLE_BLOCK_SIZE,
    ModelKind,
)

logger = logging.getLogger(__name__)


def density(model: RandomVariableModel, x: float) -> float:
    """Evaluates the density of an analytic model.

    Args:
        model: The model, which must have a density.
        x: Where to evaluate.

    Returns:
        f(x) >= 0.
    """
    log_value = log_density(model, x)
    return 0.0 if log_value == -math.inf else math.exp(log_value)


def log_density(model: RandomVariableModel, x: float) -> float:
    """Evaluates log f(x), -inf where the density vanishes."""
    magnitude = abs(x)

    if model.kind == ModelKind.EXAMPLE_A:
        if magnitude == 0:
            return -math.inf
        return math.log(0.5 * magnitude) - x * x / 2

    if model.kind == ModelKind.GAUSSIAN:
        sigma = model.sigma
        return -x * x / (2 * sigma * sigma) - math.log(sigma * math.sqrt(2 * math.pi))

    if model.kind == ModelKind.WEIBULL_SYM:
        m, scale = model.m, model.scale
        ratio = magnitude / scale
        prefactor = math.log(m / (2 * scale))
        if ratio == 0:
            if m == 1:
                return prefactor
            return math.inf if m < 1 else -math.inf
        return prefactor + (m - 1) * math.log(ratio) - ratio**m

    msg = f"A {model.kind.value} model has no density."
    raise UnsupportedKindError(msg)


def cdf(model: RandomVariableModel, x: float) -> float:
    """Evaluates P(X <= x) for an analytic model.

    Args:
        model: The model, which must have a density.
        x: Where to evaluate.

    Returns:
        The distribution function at x.
    """
    if model.kind == ModelKind.EXAMPLE_A:
        half_tail = 0.5 * math.exp(-x * x / 2)
        return half_tail if x < 0 else 1.0 - half_tail

    if model.kind == ModelKind.GAUSSIAN:
        return float(special.ndtr(x / model.sigma))

    if model.kind == ModelKind.WEIBULL_SYM:
        half_tail = 0.5 * math.exp(-((abs(x) / model.scale) ** model.m))
        return half_tail if x < 0 else 1.0 - half_tail

    msg = f"A {model.kind.value} model has no closed-form distribution function here."
    raise UnsupportedKindError(msg)


def block_generator(seed: int, block_index: int) -> np.random.Generator:
    """Returns the Philox stream for one block of draws.

    Args:
        seed: The run seed, a non-negative 64-bit integer.
        block_index: Index of the block.

    Returns:
        A generator that depends on (seed, block_index) only.
    """
    sequence = np.random.SeedSequence(seed, spawn_key=(block_index,))
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(seed: int, *keys: int) -> int:
    """Derives an independent 64-bit seed from a run seed and integer keys."""
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def draw(model: RandomVariableModel, generator: np.random.Generator, size: int) -> np.ndarray:
    """Draws iid values of a model from an explicit generator.

    Args:
        model: The model to draw from.
        generator: The random stream.
        size: Number of draws.

    Returns:
        Array with the draws.
    """
    if model.kind == ModelKind.EXAMPLE_A:
        # |X| = sqrt(2E) for standard exponential E.
        magnitudes = np.sqrt(2.0 * generator.standard_exponential(size))
        return magnitudes * random_signs(generator, size)

    if model.kind == ModelKind.GAUSSIAN:
        return model.sigma * generator.standard_normal(size)

    if model.kind == ModelKind.RADEMACHER:
        return random_signs(generator, size)

    if model.kind == ModelKind.WEIBULL_SYM:
        magnitudes = model.scale * generator.standard_exponential(size) ** (1.0 / model.m)
        return magnitudes * random_signs(generator, size)

    if model.kind == ModelKind.FINITE_DISCRETE:
        values = np.array([value for value, _ in model.atoms])
        probabilities = np.array([probability for _, probability in model.atoms])
        return values[generator.choice(len(values), size=size, p=probabilities)]

    return generator.choice(model.samples, size=size)


def random_signs(generator: np.random.Generator, size: int) -> np.ndarray:
    """Returns iid Rademacher signs as floats."""
    return generator.integers(0, 2, size=size) * 2.0 - 1.0


def sample(
    model: RandomVariableModel, count: int, seed: int, workers: int = 1
) -> SampleSet:
    """Draws a reproducible iid sample of a model.

    Args:
        model: The model to sample.
        count: Number of draws, at least 1.
        seed: Non-negative 64-bit seed.
        workers: Number of threads producing blocks. Does not change the values.

    Returns:
        The sample set.
    """
    validate_sampling_request(count, seed)

    def produce_block(block_index: int) -> np.ndarray:
        size = block_size(count, block_index)
        return draw(model, block_generator(seed, block_index), size)

    values = run_blocks(produce_block, count, workers)
    return SampleSet(values=values, seed=seed, model_label=model.label)


def sample_sum(
    sum_model: SumModel, count: int, seed: int, workers: int = 1
) -> SampleSet:
    """Draws reproducible realizations of a (normalized) sum of iid copies.

    Args:
        sum_model: The sum to sample.
        count: Number of realizations, at least 1.
        seed: Non-negative 64-bit seed.
        workers: Number of threads producing blocks. Does not change the values.

    Returns:
        The sample set, one value per realization of the sum.
    """
    validate_sampling_request(count, seed)
    n = sum_model.n

    def produce_block(block_index: int) -> np.ndarray:
        size = block_size(count, block_index)
        terms = draw(sum_model.base, block_generator(seed, block_index), size * n)
        return terms.reshape(size, n).sum(axis=1) * sum_model.scale_factor

    values = run_blocks(produce_block, count, workers)
    return SampleSet(values=values, seed=seed, model_label=sum_model.label)


def validate_sampling_request(count: int, seed: int) -> None:
    """Raises ValueError for counts below 1 and seeds outside the 64-bit range."""
    if count < 1:
        msg = f"Sample count must be at least 1, got {count}."
        raise ValueError(msg)
    if not 0 <= seed < 2**64:
        msg = f"Seeds are non-negative 64-bit integers, got {seed}."
        raise ValueError(msg)


def block_size(count: int, block_index: int) -> int:
    """Number of draws in a given block."""
    return min(SAMPLE_BLOCK_SIZE, count - block_index * SAMPLE_BLOCK_SIZE)


def run_blocks(produce_block, count: int, workers: int) -> np.ndarray:
    """Produces all blocks, possibly in parallel, and joins them in block order."""
    block_count = math.ceil(count / SAMPLE_BLOCK_SIZE)
    logger.debug("Sampling %d draws in %d blocks on %d workers", count, block_count, workers)

    if workers <= 1 or block_count == 1:
        blocks = [produce_block(index) for index in range(block_count)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            blocks = list(executor.map(produce_block, range(block_count)))

    values = np.concatenate(blocks)
    values.setflags(write=False)
    return values


def integer_moments(model: RandomVariableModel, order: int) -> list[float]:
    """Exact raw moments E X^k for k = 0..order.

    Args:
        model: The model.
        order: Highest moment order.

    Returns:
        The moments, E X^0 = 1 first. Values too large for a float are +inf.
    """
    moments = [1.0]
    for k in range(1, order + 1):
        moments.append(raw_moment(model, k))
    return moments


def raw_moment(model: RandomVariableModel, k: int) -> float:
    """E X^k for a single integer order k >= 1."""
    atoms = model.support_atoms
    if atoms is not None:
        return math.fsum(probability * value**k for value, probability in atoms)

    if model.kind == ModelKind.EMPIRICAL:
        return float(np.mean(model.samples**k))

    # The remaining kinds are symmetric.
    if k % 2:
        return 0.0

    half = k // 2
    if model.kind == ModelKind.EXAMPLE_A:
        log_moment = half * math.log(2) + math.lgamma(half + 1)
    elif model.kind == ModelKind.GAUSSIAN:
        # (k-1)!! = 2^(k/2) Gamma((k+1)/2) / sqrt(pi)
        log_moment = (
            k * math.log(model.sigma)
            + half * math.log(2)
            + math.lgamma((k + 1) / 2)
            - 0.5 * math.log(math.pi)
        )
    else:
        log_moment = k * math.log(model.scale) + math.lgamma(1 + k / model.m)

    try:
        return math.exp(log_moment)
    except OverflowError:
        return math.inf


def convolve_moments(first: list[float], second: list[float]) -> list[float]:
    """Raw moments of A + B for independent A, B from their raw moments."""
    order = min(len(first), len(second)) - 1
    moments = []
    for k in range(order + 1):
        terms = [
            math.comb(k, j) * first[j] * second[k - j]
            for j in range(k + 1)
            if first[j] != 0 and second[k - j] != 0
        ]
        moments.append(math.fsum(terms) if terms else 0.0)
    return moments


def sum_integer_moments(sum_model: SumModel, order: int) -> list[float]:
    """Exact raw moments of a sum of iid copies, by binary doubling of convolutions.

    Args:
        sum_model: The sum.
        order: Highest moment order.

    Returns:
        E S^k for k = 0..order.
    """
    power = integer_moments(sum_model.base, order)
    result = [1.0] + [0.0] * order
    remaining = sum_model.n
    while remaining:
        if remaining & 1:
            result = convolve_moments(result, power)
        remaining >>= 1
        if remaining:
            power = convolve_moments(power, power)

    factor = sum_model.scale_factor
    return [moment * factor**k if moment else 0.0 for k, moment in enumerate(result)]


def can_enumerate(sum_model: SumModel) -> bool:
    """True when the law of the sum can be enumerated exactly."""
    atoms = sum_model.base.support_atoms
    if atoms is None:
        return False
    return len(atoms) ** sum_model.n <= MAX_ENUMERATED_OUTCOMES


def enumerate_sum(sum_model: SumModel) -> tuple[np.ndarray, np.ndarray]:
    """The exact law of a sum of discrete iid copies by convolution enumeration.

    Args:
        sum_model: A sum whose base has finite support.

    Returns:
        Atom values and their probabilities, values sorted increasingly.
    """
    if not can_enumerate(sum_model):
        msg = f"{sum_model.label} has too many joint outcomes to enumerate."
        raise DomainError(msg)

    atoms = sum_model.base.support_atoms
    base_values = np.array([value for value, _ in atoms])
    base_probabilities = np.array([probability for _, probability in atoms])

    values = np.zeros(1)
    probabilities = np.ones(1)
    for _ in range(sum_model.n):
        joint_values = np.add.outer(values, base_values).ravel()
        joint_probabilities = np.multiply.outer(probabilities, base_probabilities).ravel()
        values, inverse = np.unique(joint_values, return_inverse=True)
        probabilities = np.bincount(inverse, weights=joint_probabilities)

    return values * sum_model.scale_factor, probabilities
