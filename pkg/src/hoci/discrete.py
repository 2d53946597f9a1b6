"""Exact discrete construction with tunable overlap and its brute-force oracle.

The construction: draw n i.i.d. base symbols Z_1..Z_n from one pmf and let
X_i be the (n-1)-tuple of all symbols except Z_i.  Any l of the X_i then
share exactly n-l base symbols, so the l-th order common information is
(n-l) H(Z) — in particular the pairwise value (n-2) H(Z) grossly
overestimates the (n-th order) information common to all variables, which is
zero by construction.

Membership is represented as integer bit-masks: bit t of a mask says whether
base symbol t is included.  The canonical X_i masks have a single zero at
position t = i.  Intersections (AND) of masks realize the sufficient-common-
information variables level by level, and the MI between any two mask
variables reduces to weight(a AND b) * H(Z) because the base symbols are
i.i.d.  A full joint-pmf enumeration provides an independent oracle for that
shortcut, capped by state-space size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .channels import ChannelMatrix
from .errors import CapacityError, ParameterDomainError

ENUMERATION_CAP = 10**6
PMF_TOL = 1e-12

# Default spacing factor between successive digit scales in sampled channels;
# see sample_channels.
RADIX_FACTOR = 4


def exact_entropy(pmf) -> float:
    """Shannon entropy -sum p log2 p in bits, with 0 log 0 = 0."""
    p = _validate_pmf(pmf)
    nz = p[p > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def _validate_pmf(pmf) -> np.ndarray:
    p = np.asarray(pmf, dtype=np.float64)
    if p.ndim != 1 or p.size < 2:
        raise ParameterDomainError("pmf must be a vector over an alphabet of size >= 2")
    if (p < 0.0).any() or not np.isfinite(p).all():
        raise ParameterDomainError("pmf entries must be finite and nonnegative")
    if abs(float(p.sum()) - 1.0) > PMF_TOL:
        raise ParameterDomainError(f"pmf sums to {float(p.sum())!r}, not 1")
    return p


@dataclass(frozen=True)
class DiscreteEnsemble:
    """The canonical n-symbol construction over one base pmf."""

    n: int
    alphabet_size: int
    base_pmf: tuple[float, ...]
    membership_masks: tuple[int, ...]

    @property
    def entropy_bits(self) -> float:
        return exact_entropy(self.base_pmf)

    def mask_string(self, mask: int) -> str:
        """Render a mask; character t is symbol t's membership flag."""
        return "".join("1" if (mask >> t) & 1 else "0" for t in range(self.n))


@dataclass(frozen=True)
class MaskSet:
    """Deduplicated masks at one construction level (level 1 = the X_i themselves)."""

    level: int
    masks: frozenset[int]


def build_ensemble(n: int, base_pmf) -> DiscreteEnsemble:
    """Build the canonical ensemble: mask i has its single zero at position i."""
    if not (isinstance(n, (int, np.integer)) and n >= 3):
        raise ParameterDomainError(f"n must be an integer >= 3, got {n}")
    p = _validate_pmf(base_pmf)
    full = (1 << n) - 1
    masks = tuple(full & ~(1 << i) for i in range(n))
    return DiscreteEnsemble(
        n=int(n),
        alphabet_size=int(p.size),
        base_pmf=tuple(float(v) for v in p),
        membership_masks=masks,
    )


def _check_mask(ensemble: DiscreteEnsemble, mask: int) -> int:
    if not 0 <= mask < (1 << ensemble.n):
        raise ParameterDomainError(f"mask {mask} is not a length-{ensemble.n} bit-string")
    return int(mask)


def mask_mi(ensemble: DiscreteEnsemble, mask_a: int, mask_b: int) -> float:
    """Exact MI in bits between two mask variables: weight(a AND b) * H(Z).

    Because the base symbols are i.i.d., the two symbol tuples share exactly
    the overlap symbols and the MI is the overlap's joint entropy.
    """
    a = _check_mask(ensemble, mask_a)
    b = _check_mask(ensemble, mask_b)
    return (a & b).bit_count() * ensemble.entropy_bits


def enumerate_mask_mi(ensemble: DiscreteEnsemble, mask_a: int, mask_b: int) -> float:
    """Independent oracle: MI from the full joint pmf over both tuples.

    Enumerates all alphabet_size^n outcomes; refuses oversized requests.
    """
    a = _check_mask(ensemble, mask_a)
    b = _check_mask(ensemble, mask_b)
    A, n = ensemble.alphabet_size, ensemble.n
    states = A**n
    if states > ENUMERATION_CAP:
        raise CapacityError(
            f"enumeration over {A}^{n} = {states} states exceeds cap {ENUMERATION_CAP}"
        )
    # outcome table: row per state, column per symbol
    grid = np.indices((A,) * n).reshape(n, states)
    pmf = np.asarray(ensemble.base_pmf)
    probs = np.ones(states)
    for t in range(n):
        probs *= pmf[grid[t]]

    def codes(mask: int) -> np.ndarray:
        c = np.zeros(states, dtype=np.int64)
        for pos, t in enumerate(t for t in range(n) if (mask >> t) & 1):
            c += grid[t] * (A**pos)
        return c

    ca, cb = codes(a), codes(b)
    na, nb = int(ca.max()) + 1, int(cb.max()) + 1
    joint = np.zeros((na, nb))
    np.add.at(joint, (ca, cb), probs)
    pa = joint.sum(axis=1, keepdims=True)
    pb = joint.sum(axis=0, keepdims=True)
    nzidx = joint > 0.0
    return float((joint[nzidx] * np.log2(joint[nzidx] / (pa @ pb)[nzidx])).sum())


def build_t_level(ensemble: DiscreteEnsemble, level: int) -> MaskSet:
    """Masks of the level-l construction.

    Level 1 is the original masks; level l intersects each level-(l-1) mask
    with each level-1 mask, keeping only intersections that actually remove a
    symbol (an AND that changes nothing is not a new overlap), then
    deduplicates.  For the canonical ensemble this yields all weight-(n-l)
    masks, C(n, n-l) of them.
    """
    if not 1 <= level <= ensemble.n - 1:
        raise ParameterDomainError(
            f"level must lie in [1, {ensemble.n - 1}], got {level}"
        )
    current = set(ensemble.membership_masks)
    for _ in range(level - 1):
        current = {
            a & b
            for a in current
            for b in ensemble.membership_masks
            if (a & b) != a
        }
    return MaskSet(level=level, masks=frozenset(current))


@dataclass(frozen=True)
class LevelVerification:
    level: int
    expected_bits: float
    min_mask_mi_bits: float
    exact_match: bool
    enumeration_bits: float | None
    enumeration_abs_err: float | None


@dataclass(frozen=True)
class Theorem5Verification:
    n: int
    alphabet_size: int
    entropy_bits: float
    levels: tuple[LevelVerification, ...]
    passed: bool


def verify_theorem5(
    n: int,
    base_pmf,
    enumeration_tol: float = 1e-10,
    enumeration_cap: int = ENUMERATION_CAP,
) -> Theorem5Verification:
    """Check the construction's common-information values level by level.

    For each l in [2, n], the minimum MI between a level-(l-1) mask and an
    original mask must equal (n-l) H(Z) exactly on the weight-shortcut path,
    and match the joint-pmf enumeration within ``enumeration_tol`` when the
    state space fits under the cap.  (l = n is included: the information
    common to all n variables is zero by construction.)
    """
    ens = build_ensemble(n, base_pmf)
    h = ens.entropy_bits
    can_enumerate = ens.alphabet_size**ens.n <= enumeration_cap
    levels = []
    for ell in range(2, ens.n + 1):
        prev = build_t_level(ens, ell - 1)
        pairs = [(a, b) for a in prev.masks for b in ens.membership_masks]
        min_shortcut = min(mask_mi(ens, a, b) for a, b in pairs)
        expected = (ens.n - ell) * h
        enum_val = enum_err = None
        if can_enumerate:
            enum_val = min(enumerate_mask_mi(ens, a, b) for a, b in pairs)
            enum_err = abs(enum_val - expected)
        levels.append(
            LevelVerification(
                level=ell,
                expected_bits=expected,
                min_mask_mi_bits=min_shortcut,
                exact_match=min_shortcut == expected,
                enumeration_bits=enum_val,
                enumeration_abs_err=enum_err,
            )
        )
    passed = all(
        lv.exact_match
        and (lv.enumeration_abs_err is None or lv.enumeration_abs_err <= enumeration_tol)
        for lv in levels
    )
    return Theorem5Verification(
        n=ens.n,
        alphabet_size=ens.alphabet_size,
        entropy_bits=h,
        levels=tuple(levels),
        passed=passed,
    )


def sample_channels(
    ensemble: DiscreteEnsemble,
    num_samples: int,
    seed: int,
    radix: int | None = None,
) -> ChannelMatrix:
    """Draw i.i.d. base symbols and encode each X_i tuple as one real channel.

    Each tuple is packed by place value: symbol ranks within the mask map to
    digit positions with weight radix^position.  The radix defaults to
    RADIX_FACTOR * alphabet_size rather than the dense alphabet_size: the
    spacing between successive digit scales is what lets an additive-noise
    analysis degrade the encoded symbols one scale at a time instead of
    blurring all of them simultaneously.  A dense radix (= alphabet_size) is
    still valid and injective, just without that separation.
    """
    if num_samples < 1:
        raise ParameterDomainError("num_samples must be positive")
    if radix is None:
        radix = RADIX_FACTOR * ensemble.alphabet_size
    if radix < ensemble.alphabet_size:
        raise ParameterDomainError(
            f"radix {radix} cannot injectively encode alphabet of size {ensemble.alphabet_size}"
        )
    rng = np.random.default_rng(int(seed))
    z = rng.choice(ensemble.alphabet_size, size=(ensemble.n, num_samples), p=ensemble.base_pmf)
    rows = []
    for mask in ensemble.membership_masks:
        symbols = [t for t in range(ensemble.n) if (mask >> t) & 1]
        enc = np.zeros(num_samples)
        for pos, t in enumerate(symbols):
            enc += z[t] * float(radix) ** pos
        rows.append(enc)
    names = tuple(f"x{i + 1}" for i in range(ensemble.n))
    return ChannelMatrix(names=names, data=np.array(rows))


def canonical_level_size(n: int, level: int) -> int:
    """Expected deduplicated mask count at a level: C(n, n - level)."""
    return math.comb(n, n - level)


def all_level_masks(n: int, level: int) -> frozenset[int]:
    """All weight-(n-level) masks of length n (reference for dedup checks)."""
    out = set()
    for missing in combinations(range(n), level):
        m = (1 << n) - 1
        for i in missing:
            m &= ~(1 << i)
        out.add(m)
    return frozenset(out)
