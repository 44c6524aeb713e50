"""Whole-stack evaluation engines and their mutual-consistency check.

Three engines share the single-filter primitives from
:mod:`polcascade.core`:

* :func:`run_classical` folds Malus's law over the stack and tracks
  intensities.
* :func:`run_quantum_exact` multiplies Born-rule pass probabilities along
  the collapse chain (density-matrix first stage for unpolarized input).
* :func:`run_monte_carlo` samples individual photons with counter-based
  per-photon random streams, so results are bit-identical for a fixed
  seed no matter how the photon population is partitioned across workers.

:func:`compare` reconciles the classical intensity fraction with the
quantum cumulative probability; the two agree because transmitted
intensity is proportional to the photon transmission probability.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    Angle,
    ClassicalBeam,
    DensityMatrix2,
    FilterStack,
    Polarizer,
    ZERO_PROBABILITY_TOL,
    classical_transmit,
    density_pass_probability,
    density_project,
    ket,
    pass_probability,
    project,
)

# Two-sided 95% normal quantile, used by the Wilson score interval.
_Z95 = 1.959963984540054

# Photons per work unit; counts reduce by integer addition, so any
# partitioning yields identical results.
_CHUNK_SIZE = 1 << 16


class ComparisonDomainError(ValueError):
    """Raised when two traces are not comparable (different stack or input)."""


@dataclass(frozen=True)
class PhotonInput:
    """Quantum-side input: a pure ket at a plane angle, or unpolarized.

    Unpolarized input is represented exactly as the density matrix I/2 by
    the exact engine, and samplably as a uniform random plane angle per
    photon by the Monte Carlo engine; both reproduce the 1/2 first-filter
    factor.
    """

    angle: Angle | None = None

    @classmethod
    def unpolarized(cls) -> PhotonInput:
        return cls(angle=None)

    @classmethod
    def pure_ket(cls, angle: Angle) -> PhotonInput:
        return cls(angle=angle)

    @property
    def is_unpolarized(self) -> bool:
        return self.angle is None


@dataclass(frozen=True)
class StageRecord:
    """Per-filter result of an engine run (1-based stage index)."""

    stage_index: int
    axis: Angle
    classical_intensity_after: float | None = None
    stage_pass_probability: float | None = None
    cumulative_probability: float | None = None


@dataclass(frozen=True)
class CascadeTrace:
    """End-to-end result of a classical or exact quantum run."""

    input_description: ClassicalBeam | PhotonInput
    stages: tuple[StageRecord, ...]
    final_transmitted_fraction: float


@dataclass(frozen=True)
class MonteCarloConfig:
    """Photon-sampling run description; identifies the result bit-exactly."""

    photon_count: int
    seed: int
    input: PhotonInput
    stack: FilterStack

    def __post_init__(self) -> None:
        if not isinstance(self.photon_count, int) or self.photon_count < 1:
            raise ValueError(
                f"photon_count must be an integer >= 1, got {self.photon_count!r}"
            )
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


@dataclass(frozen=True)
class MonteCarloReport:
    """Counts and binomial statistics from a Monte Carlo run."""

    config: MonteCarloConfig
    per_stage_survivor_counts: tuple[int, ...]
    transmitted_count: int
    estimate: float
    standard_error: float
    confidence_interval_95: tuple[float, float]

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def photon_count(self) -> int:
        return self.config.photon_count


@dataclass(frozen=True)
class ComparisonReport:
    """Per-stage and final differences between classical and quantum runs."""

    stage_differences: tuple[float, ...]
    final_difference: float
    max_difference: float
    tolerance: float
    passed: bool


def run_classical(input: ClassicalBeam, stack: FilterStack) -> CascadeTrace:
    """Fold Malus-law transmission over the stack.

    Records the intensity after each stage. The final transmitted fraction
    is final intensity over input intensity (0 for a dark input beam); an
    empty stack transmits unchanged with fraction 1.
    """
    beam = input
    stages = []
    for i, pol in enumerate(stack, start=1):
        beam = classical_transmit(beam, pol)
        stages.append(
            StageRecord(
                stage_index=i,
                axis=pol.axis,
                classical_intensity_after=beam.intensity,
            )
        )
    if input.intensity > 0.0:
        fraction = beam.intensity / input.intensity
    else:
        fraction = 0.0
    return CascadeTrace(
        input_description=input,
        stages=tuple(stages),
        final_transmitted_fraction=fraction,
    )


def run_quantum_exact(input: PhotonInput, stack: FilterStack) -> CascadeTrace:
    """Exact sequential projective-measurement probabilities for the stack.

    For a pure-ket input each stage contributes the Born-rule pass
    probability and collapses the state onto the filter axis; the
    cumulative probability is the running product. Unpolarized input
    starts from the density matrix I/2 for the first stage and evolves as
    a pure state afterwards.

    A stage probability below 1e-15 is the physical zero (orthogonal
    filter pair): it is recorded as exactly 0, every later cumulative
    probability is exactly 0, and no projection error is raised.
    """
    stages = []
    cumulative = 1.0
    extinct = False
    state = None if input.is_unpolarized else ket(input.angle)
    rho = DensityMatrix2.unpolarized() if input.is_unpolarized else None

    for i, pol in enumerate(stack, start=1):
        if extinct:
            prob = 0.0
        else:
            if rho is not None:
                prob = density_pass_probability(rho, pol)
            else:
                prob = pass_probability(state, pol)
            if prob < ZERO_PROBABILITY_TOL:
                prob = 0.0
                extinct = True
            elif rho is not None:
                density_project(rho, pol)
                # post-measurement state is pure: continue in ket form
                state = ket(pol.axis)
                rho = None
            else:
                state = project(state, pol)
        cumulative = 0.0 if extinct else cumulative * prob
        stages.append(
            StageRecord(
                stage_index=i,
                axis=pol.axis,
                stage_pass_probability=prob,
                cumulative_probability=cumulative,
            )
        )
    return CascadeTrace(
        input_description=input,
        stages=tuple(stages),
        final_transmitted_fraction=cumulative,
    )


def wilson_interval_95(successes: int, trials: int) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion.

    Stays inside [0, 1] and keeps a sensible width when the observed
    proportion is 0 or 1, unlike the normal approximation.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    z = _Z95
    p_hat = successes / trials
    denom = 1.0 + z * z / trials
    center = (p_hat + z * z / (2 * trials)) / denom
    margin = (z / denom) * math.sqrt(
        p_hat * (1.0 - p_hat) / trials + z * z / (4.0 * trials * trials)
    )
    # the score equation has exact roots at the scale ends; computing them
    # as center -/+ margin would leave rounding residue
    lo = 0.0 if successes == 0 else max(0.0, center - margin)
    hi = 1.0 if successes == trials else min(1.0, center + margin)
    return (lo, hi)


def _photon_uniforms(seed: int, start: int, count: int, draws: int) -> np.ndarray:
    """Uniform [0, 1) draws for photons [start, start + count).

    Counter-based streams: photon i owns the Philox counter blocks
    [i*bpp, (i+1)*bpp) under the key `seed`, where each 256-bit block
    yields four doubles. Row j of the result is therefore a pure function
    of (seed, start + j), independent of how photons are chunked.
    """
    bpp = (draws + 3) // 4  # blocks per photon
    bg = np.random.Philox(key=seed, counter=[start * bpp, 0, 0, 0])
    u = np.random.Generator(bg).random((count, 4 * bpp))
    return u[:, :draws]


def _survivors_in_chunk(
    config: MonteCarloConfig,
    start: int,
    count: int,
    first_axis: float,
    conditional_probs: list[float],
) -> np.ndarray:
    """Per-stage survivor counts for a contiguous block of photons."""
    n_stages = len(config.stack)
    draws = n_stages + 1  # slot 0 is the plane-angle draw, then one per filter
    u = _photon_uniforms(config.seed, start, count, draws)
    counts = np.zeros(n_stages, dtype=np.int64)

    if config.input.is_unpolarized:
        theta = u[:, 0] * np.pi
        dot = np.cos(first_axis) * np.cos(theta) + np.sin(first_axis) * np.sin(theta)
        p_first = dot * dot
    else:
        p_first = pass_probability(ket(config.input.angle), config.stack.polarizers[0])
    alive = u[:, 1] < p_first
    counts[0] = np.count_nonzero(alive)
    # after any filter every survivor is collapsed onto that axis, so the
    # remaining stage probabilities are scalars
    for j in range(1, n_stages):
        alive &= u[:, j + 1] < conditional_probs[j - 1]
        counts[j] = np.count_nonzero(alive)
    return counts


def run_monte_carlo(config: MonteCarloConfig, workers: int = 1) -> MonteCarloReport:
    """Sample individual photons through the stack.

    Each photon draws a plane angle uniform on [0, pi) if the input is
    unpolarized, then at each filter draws u uniform on [0, 1) and passes
    iff u < its Born-rule pass probability, collapsing onto the filter
    axis. All randomness comes from a dedicated counter-based stream per
    photon keyed by (seed, photon index), and per-stage survivor counts
    reduce by integer addition, so the report is bit-identical for a fixed
    config regardless of worker count or execution order.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers!r}")
    n = config.photon_count
    stack = config.stack
    if len(stack) == 0:
        # nothing to absorb a photon: every one is transmitted
        counts: tuple[int, ...] = ()
        transmitted = n
    else:
        first_axis = stack.polarizers[0].axis.radians
        conditional_probs = [
            pass_probability(ket(stack.polarizers[j - 1].axis), stack.polarizers[j])
            for j in range(1, len(stack))
        ]
        chunks = [
            (start, min(_CHUNK_SIZE, n - start)) for start in range(0, n, _CHUNK_SIZE)
        ]

        def work(chunk: tuple[int, int]) -> np.ndarray:
            start, count = chunk
            return _survivors_in_chunk(
                config, start, count, first_axis, conditional_probs
            )

        if workers == 1 or len(chunks) == 1:
            partials = [work(c) for c in chunks]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                partials = list(pool.map(work, chunks))
        totals = np.sum(partials, axis=0, dtype=np.int64)
        counts = tuple(int(c) for c in totals)
        transmitted = counts[-1]
    estimate = transmitted / n
    stderr = math.sqrt(estimate * (1.0 - estimate) / n)
    return MonteCarloReport(
        config=config,
        per_stage_survivor_counts=counts,
        transmitted_count=transmitted,
        estimate=estimate,
        standard_error=stderr,
        confidence_interval_95=wilson_interval_95(transmitted, n),
    )


def _compatible_inputs(
    classical: ClassicalBeam | PhotonInput, quantum: ClassicalBeam | PhotonInput
) -> bool:
    # unpolarized matches unpolarized; a linear beam matches a pure ket at
    # the same canonical plane angle
    if isinstance(classical, ClassicalBeam) and isinstance(quantum, PhotonInput):
        if classical.plane is None:
            return quantum.is_unpolarized
        return quantum.angle == classical.plane
    return False


def compare(
    classical: CascadeTrace, quantum: CascadeTrace, tolerance: float
) -> ComparisonReport:
    """Check that intensity fractions and cumulative probabilities agree.

    The compared quantity is the dimensionless transmitted fraction:
    classical intensity after each stage divided by the input intensity,
    against the quantum cumulative probability. Intensities are never
    compared to probabilities directly. For unpolarized input both engines
    include the 1/2 first-filter factor, so the fractions line up stage by
    stage.

    Raises
    ------
    ComparisonDomainError
        If the traces are not a (classical, quantum) pair over the same
        stack and equivalent input.
    """
    if not isinstance(classical.input_description, ClassicalBeam):
        raise ComparisonDomainError("first trace must come from the classical engine")
    if not isinstance(quantum.input_description, PhotonInput):
        raise ComparisonDomainError("second trace must come from the quantum engine")
    if not _compatible_inputs(classical.input_description, quantum.input_description):
        raise ComparisonDomainError("traces describe different input kinds")
    c_axes = tuple(s.axis for s in classical.stages)
    q_axes = tuple(s.axis for s in quantum.stages)
    if c_axes != q_axes:
        raise ComparisonDomainError("traces describe different filter stacks")

    intensity_in = classical.input_description.intensity
    diffs = []
    for c_stage, q_stage in zip(classical.stages, quantum.stages):
        if c_stage.classical_intensity_after is None:
            raise ComparisonDomainError("classical trace is missing stage intensities")
        if q_stage.cumulative_probability is None:
            raise ComparisonDomainError("quantum trace is missing stage probabilities")
        if intensity_in > 0.0:
            fraction = c_stage.classical_intensity_after / intensity_in
        else:
            fraction = 0.0
        diffs.append(abs(fraction - q_stage.cumulative_probability))
    final_diff = abs(
        classical.final_transmitted_fraction - quantum.final_transmitted_fraction
    )
    max_diff = max([final_diff, *diffs])
    return ComparisonReport(
        stage_differences=tuple(diffs),
        final_difference=final_diff,
        max_difference=max_diff,
        tolerance=tolerance,
        passed=max_diff <= tolerance,
    )


def staircase_transmission(n: int, start: Angle, end: Angle) -> CascadeTrace:
    """Exact quantum transmission through n equally spaced filters.

    The stack steps from `start` to `end` in n equal increments (the first
    filter sits one step past `start`, the last exactly at `end`) and the
    input is the pure ket at `start`. For equal steps the cumulative
    probability is (cos^2((end-start)/n))^n, which grows toward 1 as n
    increases: frequent gentle projections pass almost everything.
    """
    if n < 1:
        raise ValueError(f"staircase needs n >= 1 filters, got {n!r}")
    step = (end.radians - start.radians) / n
    stack = FilterStack(
        tuple(Polarizer(Angle(start.radians + k * step)) for k in range(1, n + 1))
    )
    return run_quantum_exact(PhotonInput.pure_ket(start), stack)
