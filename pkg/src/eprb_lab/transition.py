"""Transition sets, membership classification, escape regions and P(sigma_minus).

For a setting quadruple (a, a', b, b') there are four transition sets: the
lambdas where one wing's outcome responds to a swap of the *other* wing's
setting while its own is held fixed.  In canonical order:

======  =============  ================================
index   id             defining comparison
======  =============  ================================
0       bob@b          B(a, b)  vs B(a', b)
1       alice@a'       A(a', b) vs A(a', b')
2       bob@b'         B(a, b') vs B(a', b')
3       alice@a        A(a, b)  vs A(a, b')
======  =============  ================================

A lambda's membership pattern across the four sets, together with the four
context outcome products, obeys a parity rule: the product of the four signs
is -1 exactly when the membership count is odd.  The odd-membership patterns
form the eight regions T1..T8 (T1..T4: exactly three memberships, with the
excluded set walking through canonical indices 0..3; T5..T8: exactly one
membership, the member walking through canonical indices 3..0).  The
even-membership patterns get artifact labels: E1..E6 for the exactly-two
patterns in lexicographic index-pair order, F for all four, "none" for zero.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import (
    AngleQuadruple,
    Distribution,
    HvModel,
    MeasureEstimate,
    NumericalInvariantError,
    Scheme,
    as_lambda_point,
    context_outcomes,
    estimate_measure,
    sweep_statistics,
)


class TransitionSetId(enum.Enum):
    """The four swap-response sets, in canonical order; values are the
    stable row labels used in reports."""

    BOB_AT_B = "bob@b"
    ALICE_AT_A_PRIME = "alice@a'"
    BOB_AT_B_PRIME = "bob@b'"
    ALICE_AT_A = "alice@a"


CANONICAL_SETS: tuple[TransitionSetId, ...] = tuple(TransitionSetId)

SET_INDEX: dict[TransitionSetId, int] = {sid: i for i, sid in enumerate(CANONICAL_SETS)}

# (wing, pre-context, post-context): the compared outcome is the wing's, the
# two contexts differ only in the other wing's setting, unprimed swap slot
# listed first.  Context indices follow the canonical (a,b), (a',b), (a',b'),
# (a,b') order.
_SET_CONTEXTS: dict[TransitionSetId, tuple[str, int, int]] = {
    TransitionSetId.BOB_AT_B: ("B", 0, 1),
    TransitionSetId.ALICE_AT_A_PRIME: ("A", 1, 2),
    TransitionSetId.BOB_AT_B_PRIME: ("B", 3, 2),
    TransitionSetId.ALICE_AT_A: ("A", 0, 3),
}


def _build_region_labels() -> tuple[str, ...]:
    labels = [""] * 16
    labels[0] = "none"
    labels[15] = "F"
    for j in range(4):
        labels[1 << j] = f"T{8 - j}"
        labels[15 ^ (1 << j)] = f"T{1 + j}"
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    for rank, (i, j) in enumerate(pairs, start=1):
        labels[(1 << i) | (1 << j)] = f"E{rank}"
    return tuple(labels)


#: Region label for each 4-bit membership mask (bit i = canonical set i).
LABELS_BY_MASK: tuple[str, ...] = _build_region_labels()

T_REGION_LABELS: tuple[str, ...] = tuple(f"T{i}" for i in range(1, 9))
E_REGION_LABELS: tuple[str, ...] = tuple(f"E{i}" for i in range(1, 7))
ALL_REGION_LABELS: tuple[str, ...] = T_REGION_LABELS + E_REGION_LABELS + ("F", "none")

#: Membership pattern (canonical order) defining each region label.
REGION_PATTERNS: dict[str, tuple[bool, bool, bool, bool]] = {
    label: tuple(bool(mask & (1 << i)) for i in range(4))  # type: ignore[misc]
    for mask, label in enumerate(LABELS_BY_MASK)
}


@dataclass(frozen=True)
class MembershipVector:
    """Membership flags for the four sets plus the four context products.

    ``in_set`` follows the canonical set order, ``sign_pattern`` the
    canonical context order.  Vectors produced by :func:`classify_lambda`
    always satisfy the parity rule (sign product -1 iff odd membership
    count); hand-built hypothesis vectors, as consumed by the contradiction
    tracer, need not, so the rule is deliberately not enforced here.
    """

    in_set: tuple[bool, bool, bool, bool]
    sign_pattern: tuple[int, int, int, int]

    def __post_init__(self) -> None:
        if len(self.in_set) != 4 or len(self.sign_pattern) != 4:
            raise ValueError("in_set and sign_pattern must both have length 4")
        if any(s not in (-1, 1) for s in self.sign_pattern):
            raise ValueError(f"sign_pattern entries must be +1/-1, got {self.sign_pattern!r}")

    @property
    def membership_count(self) -> int:
        return sum(self.in_set)

    @property
    def mask(self) -> int:
        return sum(1 << i for i, flag in enumerate(self.in_set) if flag)

    @property
    def region(self) -> str:
        return LABELS_BY_MASK[self.mask]

    def parity_consistent(self) -> bool:
        product = 1
        for s in self.sign_pattern:
            product *= s
        return (product == -1) == (self.membership_count % 2 == 1)


def _membership_masks(
    contexts: tuple[tuple[np.ndarray, np.ndarray], ...]
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    (a1, b1), (a2, b2), (a3, b3), (a4, b4) = contexts
    members = [b1 != b2, a2 != a3, b4 != b3, a1 != a4]
    signs = [a1 * b1, a2 * b2, a3 * b3, a4 * b4]
    return members, signs


def classify_lambda(model: HvModel, quadruple: AngleQuadruple, lam: object) -> MembershipVector:
    """Evaluate all four contexts at one lambda and fill the vector."""
    point = as_lambda_point(lam, model.space).reshape(1, -1)
    contexts = context_outcomes(model, quadruple, point)
    members, signs = _membership_masks(contexts)
    return MembershipVector(
        in_set=tuple(bool(m[0]) for m in members),  # type: ignore[arg-type]
        sign_pattern=tuple(int(s[0]) for s in signs),  # type: ignore[arg-type]
    )


def _set_outcome_pair(
    model: HvModel, quadruple: AngleQuadruple, which: TransitionSetId, coords: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    wing, pre_index, post_index = _SET_CONTEXTS[which]
    contexts = quadruple.contexts()
    fn = model.outcome_a if wing == "A" else model.outcome_b
    pre = np.asarray(fn(*contexts[pre_index], coords))
    post = np.asarray(fn(*contexts[post_index], coords))
    return pre, post


def transition_measure(
    model: HvModel,
    dist: Distribution,
    quadruple: AngleQuadruple,
    which: TransitionSetId,
    scheme: Scheme,
) -> MeasureEstimate:
    """Measure of one transition set under ``dist``.

    The indicator "pre != post" equals half the absolute outcome difference
    |pre - post|/2 pointwise, so this is the integral form of the set
    measure evaluated directly.
    """

    def indicator(coords: np.ndarray) -> np.ndarray:
        pre, post = _set_outcome_pair(model, quadruple, which, coords)
        return pre != post

    return estimate_measure(dist, indicator, scheme)


def partition_measures(
    model: HvModel,
    dist: Distribution,
    quadruple: AngleQuadruple,
    which: TransitionSetId,
    scheme: Scheme,
) -> tuple[MeasureEstimate, MeasureEstimate]:
    """(P(+,-), P(-,+)): the set split by flip direction.

    (+,-) collects the lambdas whose outcome is +1 at the unprimed swap
    setting and flips to -1 at the primed one; (-,+) is the reverse.  Both
    come from one sweep, so they add up to the set measure exactly.
    """

    def masks_fn(coords: np.ndarray) -> np.ndarray:
        pre, post = _set_outcome_pair(model, quadruple, which, coords)
        member = pre != post
        return np.stack([member & (pre == 1), member & (pre == -1)])

    values, errors = sweep_statistics(dist, scheme, masks_fn, 2)
    return (
        MeasureEstimate(float(values[0]), float(errors[0]), scheme),
        MeasureEstimate(float(values[1]), float(errors[1]), scheme),
    )


@dataclass(frozen=True)
class TransitionReport:
    """Every transition-set statistic from a single sweep.

    ``region_measures`` covers all sixteen membership patterns (T1..T8,
    E1..E6, F, none).  ``sigma_minus`` is the measure of odd-membership
    lambdas, which the sweep cross-checks against the negative-sign-product
    measure cell by cell.
    """

    quadruple: AngleQuadruple
    scheme: Scheme
    set_measures: Mapping[TransitionSetId, MeasureEstimate]
    partition_measures: Mapping[TransitionSetId, tuple[MeasureEstimate, MeasureEstimate]]
    region_measures: Mapping[str, MeasureEstimate]
    sigma_minus: MeasureEstimate

    @property
    def seed(self) -> int | None:
        return self.sigma_minus.seed

    @property
    def sum_t_regions(self) -> float:
        """Sum of the eight odd-region measures; equals sigma_minus exactly
        on power-of-two grids and within float addition error otherwise."""
        return float(sum(self.region_measures[label].value for label in T_REGION_LABELS))

    def csv_rows(self) -> list[tuple[str, float, float]]:
        """(name, value, std_error) rows in a stable order."""
        rows: list[tuple[str, float, float]] = []
        for sid in CANONICAL_SETS:
            est = self.set_measures[sid]
            rows.append((sid.value, est.value, est.std_error))
        for sid in CANONICAL_SETS:
            plus_minus, minus_plus = self.partition_measures[sid]
            rows.append((f"{sid.value}:+-", plus_minus.value, plus_minus.std_error))
            rows.append((f"{sid.value}:-+", minus_plus.value, minus_plus.std_error))
        rows.append(("sigma_minus", self.sigma_minus.value, self.sigma_minus.std_error))
        rows.append(("sum_t_regions", self.sum_t_regions, 0.0))
        rows.append(("sum_t_minus_sigma", self.sum_t_regions - self.sigma_minus.value, 0.0))
        for label in ALL_REGION_LABELS:
            est = self.region_measures[label]
            rows.append((label, est.value, est.std_error))
        return rows

    def to_json(self) -> dict:
        def entry(est: MeasureEstimate) -> dict:
            return {"value": est.value, "std_error": est.std_error}

        return {
            "quadruple": {
                name.replace("'", "_prime"): angle.radians
                for name, angle in self.quadruple.named_angles().items()
            },
            "scheme": self.scheme.label,
            "seed": self.seed,
            "set_measures": {sid.value: entry(self.set_measures[sid]) for sid in CANONICAL_SETS},
            "partition_measures": {
                sid.value: {
                    "+-": entry(self.partition_measures[sid][0]),
                    "-+": entry(self.partition_measures[sid][1]),
                }
                for sid in CANONICAL_SETS
            },
            "region_measures": {
                label: entry(self.region_measures[label]) for label in ALL_REGION_LABELS
            },
            "sigma_minus": entry(self.sigma_minus),
            "sum_t_regions": self.sum_t_regions,
        }


# Statistic layout for the full-report sweep.
_N_STATS = 29
_SET_BASE = 0
_PARTITION_BASE = 4
_REGION_BASE = 12
_SIGMA_SLOT = 28


def full_report(
    model: HvModel, dist: Distribution, quadruple: AngleQuadruple, scheme: Scheme
) -> TransitionReport:
    """Classify every lambda once and report every measure from that sweep.

    Using a single pass keeps all statistics correlated on the same cells or
    samples, so additivity identities (partitions summing to set measures,
    regions summing to sigma_minus) hold exactly rather than approximately.
    Raises :class:`NumericalInvariantError` if any lambda violates the
    sign-parity rule.
    """

    def masks_fn(coords: np.ndarray) -> np.ndarray:
        contexts = context_outcomes(model, quadruple, coords)
        members, signs = _membership_masks(contexts)
        negative = (signs[0] * signs[1] * signs[2] * signs[3]) == -1
        odd = members[0] ^ members[1] ^ members[2] ^ members[3]
        if not np.array_equal(odd, negative):
            raise NumericalInvariantError(
                f"sign-parity rule violated for model {model.name!r}: some lambda has "
                "sign product -1 without odd transition-set membership"
            )
        masks = np.empty((_N_STATS, coords.shape[0]), dtype=bool)
        for i in range(4):
            masks[_SET_BASE + i] = members[i]
        pre_values = (contexts[0][1], contexts[1][0], contexts[3][1], contexts[0][0])
        for i in range(4):
            masks[_PARTITION_BASE + 2 * i] = members[i] & (pre_values[i] == 1)
            masks[_PARTITION_BASE + 2 * i + 1] = members[i] & (pre_values[i] == -1)
        mask_code = (
            members[0].astype(np.uint8)
            | (members[1].astype(np.uint8) << 1)
            | (members[2].astype(np.uint8) << 2)
            | (members[3].astype(np.uint8) << 3)
        )
        for code in range(16):
            masks[_REGION_BASE + code] = mask_code == code
        masks[_SIGMA_SLOT] = odd
        return masks

    values, errors = sweep_statistics(dist, scheme, masks_fn, _N_STATS)

    def est(slot: int) -> MeasureEstimate:
        return MeasureEstimate(float(values[slot]), float(errors[slot]), scheme)

    set_measures = {sid: est(_SET_BASE + i) for i, sid in enumerate(CANONICAL_SETS)}
    partitions = {
        sid: (est(_PARTITION_BASE + 2 * i), est(_PARTITION_BASE + 2 * i + 1))
        for i, sid in enumerate(CANONICAL_SETS)
    }
    region_measures = {
        LABELS_BY_MASK[code]: est(_REGION_BASE + code) for code in range(16)
    }
    return TransitionReport(
        quadruple=quadruple,
        scheme=scheme,
        set_measures=set_measures,
        partition_measures=partitions,
        region_measures=region_measures,
        sigma_minus=est(_SIGMA_SLOT),
    )
