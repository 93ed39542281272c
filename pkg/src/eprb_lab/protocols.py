"""The classical-communication game and the signal-locality analyzer.

Game rules: Alice and Bob share a lambda drawn from the model's
distribution, each picks one of their two settings with a fair coin, and
before answering they may exchange setting information.  Alice must send her
setting whenever Bob's outcome could depend on it for at least one of Bob's
settings (lambda lies in bob@b or bob@b'), and symmetrically for Bob, so a
run costs 0, 1 or 2 bits depending only on the membership pattern.  The
average cost is therefore an integral of the pattern-wise bit count, which
is bounded below by the measure of the odd-membership union sigma_minus.

Signal locality: a remote setting swap moves lambdas between the two halves
of a transition set (the (+,-) and (-,+) partitions).  At equilibrium the
two halves have equal measure, so the local marginal cannot shift; a biased
lambda distribution breaks the balance and the marginal moves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import (
    Angle,
    AngleQuadruple,
    Distribution,
    HvModel,
    NumericalInvariantError,
    Scheme,
    _check_seed,
    context_outcomes,
    derived_stream,
    estimate_measure,
)
from .inequalities import JointStats, hardy_bounds
from .transition import (
    ALL_REGION_LABELS,
    LABELS_BY_MASK,
    MembershipVector,
    REGION_PATTERNS,
    TransitionReport,
    TransitionSetId,
    _membership_masks,
    partition_measures,
)

# Domain tags separating the game's random streams from measure sweeps.
_DOMAIN_LAMBDA = 11
_DOMAIN_ALICE = 12
_DOMAIN_BOB = 13

_SAMPLE_BLOCK = 1 << 20


def bits_required(memberships: MembershipVector) -> int:
    """Bits exchanged for one lambda: Alice's setting travels iff lambda
    sits in a B-side set (canonical indices 0 or 2), Bob's iff in an A-side
    set (indices 1 or 3)."""
    in_set = memberships.in_set
    return int(in_set[0] or in_set[2]) + int(in_set[1] or in_set[3])


def _bits_for_pattern(pattern: tuple[bool, bool, bool, bool]) -> int:
    return int(pattern[0] or pattern[2]) + int(pattern[1] or pattern[3])


#: Bits required in each membership region (region label -> 0, 1 or 2).
REGION_BITS: dict[str, int] = {
    label: _bits_for_pattern(REGION_PATTERNS[label]) for label in ALL_REGION_LABELS
}


@dataclass(frozen=True)
class CommRunLog:
    """One game run: the shared lambda, realized settings, region, cost."""

    index: int
    lam: tuple[float, ...]
    alice_setting: str
    bob_setting: str
    region: str
    bits: int
    outcome_a: int
    outcome_b: int


@dataclass(frozen=True)
class CommSummary:
    """Aggregates of a game: average cost and empirical statistics.

    ``stats`` conditions on the realized settings (context i gets the runs
    that happened to play context i); ``context_counts`` are the run counts
    behind each context.  ``sigma_minus_bound`` is the unified lower bound
    evaluated on the empirical statistics: the cost certified by the game's
    own data, to compare against ``average_bits``.
    """

    n_runs: int
    seed: int
    average_bits: float
    bits_std_error: float
    stats: JointStats
    context_counts: tuple[int, int, int, int]
    sigma_minus_bound: float

    def to_json(self) -> dict:
        return {
            "n_runs": self.n_runs,
            "seed": self.seed,
            "average_bits": self.average_bits,
            "bits_std_error": self.bits_std_error,
            "sigma_minus_bound": self.sigma_minus_bound,
            "contexts": [
                {
                    "label": label,
                    "runs": count,
                    "p_plus": plus,
                    "p_minus": minus,
                }
                for label, count, plus, minus in zip(
                    ("ab", "a'b", "a'b'", "ab'"),
                    self.context_counts,
                    self.stats.p_plus,
                    self.stats.p_minus,
                )
            ],
        }


def simulate_game(
    model: HvModel,
    dist: Distribution,
    quadruple: AngleQuadruple,
    n_runs: int,
    seed: int,
) -> tuple[CommSummary, Iterator[CommRunLog]]:
    """Play the game for n_runs and return the summary plus a lazy run stream.

    Lambdas come from ``dist.sampler`` and the two setting coins from
    domain-separated streams of the same seed, so a (seed, n_runs) pair
    fixes every run exactly.  The returned iterator yields
    :class:`CommRunLog` records on demand; consuming it is optional.
    """
    if not isinstance(n_runs, int) or n_runs < 1:
        raise ValueError(f"n_runs must be a positive integer, got {n_runs!r}")
    _check_seed(seed)
    if dist.sampler is None:
        raise ValueError(f"distribution {dist.label!r} has no sampler; the game needs one")
    if dist.space != model.space:
        raise ValueError("distribution and model live on different spaces")

    dimension = model.space.dimension
    lambdas = np.empty((n_runs, dimension), dtype=np.float64)
    alice_choice = np.empty(n_runs, dtype=np.int64)
    bob_choice = np.empty(n_runs, dtype=np.int64)
    for block_index, start in enumerate(range(0, n_runs, _SAMPLE_BLOCK)):
        stop = min(start + _SAMPLE_BLOCK, n_runs)
        m = stop - start
        lambdas[start:stop] = dist.sampler(derived_stream(seed, _DOMAIN_LAMBDA, block_index), m)
        alice_choice[start:stop] = derived_stream(seed, _DOMAIN_ALICE, block_index).integers(0, 2, m)
        bob_choice[start:stop] = derived_stream(seed, _DOMAIN_BOB, block_index).integers(0, 2, m)
    if np.any(lambdas < 0.0) or np.any(lambdas >= 1.0):
        raise ValueError(f"sampler of {dist.label!r} produced points outside [0, 1)")

    contexts = context_outcomes(model, quadruple, lambdas)
    members, _ = _membership_masks(contexts)
    bits = (members[0] | members[2]).astype(np.int8) + (members[1] | members[3]).astype(np.int8)
    mask_code = (
        members[0].astype(np.uint8)
        | (members[1].astype(np.uint8) << 1)
        | (members[2].astype(np.uint8) << 2)
        | (members[3].astype(np.uint8) << 3)
    )

    # Realized context per run: (alice, bob) choice -> canonical index.
    context_index = np.where(
        alice_choice == 0, np.where(bob_choice == 0, 0, 3), np.where(bob_choice == 0, 1, 2)
    )
    outcome_a = np.empty(n_runs, dtype=np.int8)
    outcome_b = np.empty(n_runs, dtype=np.int8)
    counts = []
    p_plus = []
    for k in range(4):
        selected = context_index == k
        count = int(np.count_nonzero(selected))
        if count == 0:
            raise ValueError(
                f"context {k + 1} was never played in {n_runs} runs; increase n_runs"
            )
        va, vb = contexts[k]
        outcome_a[selected] = va[selected]
        outcome_b[selected] = vb[selected]
        product = va[selected] * vb[selected]
        counts.append(count)
        p_plus.append(float(np.count_nonzero(product == 1)) / count)

    stats = JointStats.from_p_plus(tuple(p_plus))
    average_bits = float(bits.mean())
    if n_runs > 1:
        bits_std_error = float(bits.std(ddof=1) / np.sqrt(n_runs))
    else:
        bits_std_error = 0.0
    summary = CommSummary(
        n_runs=n_runs,
        seed=seed,
        average_bits=average_bits,
        bits_std_error=bits_std_error,
        stats=stats,
        context_counts=tuple(counts),  # type: ignore[arg-type]
        sigma_minus_bound=hardy_bounds(stats).unified,
    )

    def run_stream() -> Iterator[CommRunLog]:
        alice_labels = ("a", "a'")
        bob_labels = ("b", "b'")
        for i in range(n_runs):
            yield CommRunLog(
                index=i,
                lam=tuple(float(x) for x in lambdas[i]),
                alice_setting=alice_labels[alice_choice[i]],
                bob_setting=bob_labels[bob_choice[i]],
                region=LABELS_BY_MASK[mask_code[i]],
                bits=int(bits[i]),
                outcome_a=int(outcome_a[i]),
                outcome_b=int(outcome_b[i]),
            )

    return summary, run_stream()


def average_bits_identity(report: TransitionReport) -> tuple[float, float]:
    """Integrate the bit cost over the report's regions.

    Returns (b_regions, lower_bound) where b_regions is the sum of
    REGION_BITS[label] * P(label) over all sixteen patterns and lower_bound
    is P(sigma_minus).  Every odd region costs at least one bit, so
    b_regions can never fall below the bound; a violation means the report
    is internally inconsistent and raises NumericalInvariantError.
    """
    b_regions = float(
        sum(
            REGION_BITS[label] * report.region_measures[label].value
            for label in ALL_REGION_LABELS
        )
    )
    lower_bound = report.sigma_minus.value
    if b_regions < lower_bound - 1e-9:
        raise NumericalInvariantError(
            f"region-integrated bits {b_regions} fell below P(sigma_minus) {lower_bound}"
        )
    return b_regions, lower_bound


def marginal_shift(
    model: HvModel,
    dist: Distribution,
    b_setting: Angle,
    a1: Angle,
    a2: Angle,
    scheme: Scheme,
) -> float:
    """|P(B=+1 at (a1, b)) - P(B=+1 at (a2, b))| under ``dist``."""

    def pointing_up(alice: Angle) -> float:
        est = estimate_measure(
            dist,
            lambda coords: np.asarray(model.outcome_b(alice, b_setting, coords)) == 1,
            scheme,
        )
        return est.value

    return abs(pointing_up(a1) - pointing_up(a2))


def detailed_balance(
    model: HvModel,
    dist: Distribution,
    quadruple: AngleQuadruple,
    which: TransitionSetId,
    scheme: Scheme,
) -> float:
    """|P(+,-) - P(-,+)| for one transition set under ``dist``.

    Zero at equilibrium for statistics-reproducing models; a nonzero gap is
    exactly the handle a remote party would need to signal.
    """
    plus_minus, minus_plus = partition_measures(model, dist, quadruple, which, scheme)
    return abs(plus_minus.value - minus_plus.value)
