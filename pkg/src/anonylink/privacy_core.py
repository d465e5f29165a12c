"""Linkage distributions, unlinkability degree and anonymity sets.

A :class:`LinkageDistribution` is a row-stochastic matrix: entry ``p[i][j]``
is the attacker's probability that item ``A_i`` is related to item ``B_j``.
Unlinkability is measured as the total-variation distance of a row from the
uniform row ``1/n_B``.

Entries may be ``float`` or :class:`fractions.Fraction`; with fractions every
operation here is exact.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Iterable, Sequence

ROW_TOL = 1e-9
DEFAULT_EPSILON = 0.05


class LinkageError(ValueError):
    pass


class IoiKind(enum.Enum):
    SUBJECT = "subject"
    MESSAGE = "message"
    COIN = "coin"
    ADDRESS = "address"
    TRANSACTION = "transaction"
    VALUE = "value"
    TIME = "time"


@dataclass(frozen=True, order=True)
class IoiId:
    kind: IoiKind
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("IOI index must be non-negative")


def ioi_set(kind: IoiKind, n: int) -> tuple[IoiId, ...]:
    return tuple(IoiId(kind, i) for i in range(n))


def _check_ioi_set(items: Sequence[IoiId]) -> None:
    if len(set(items)) != len(items):
        raise LinkageError("duplicate IOI in set")


def _check_simplex(vec: Sequence[Real], what: str) -> None:
    for x in vec:
        if x < -ROW_TOL or x > 1 + ROW_TOL:
            raise LinkageError(f"{what}: entry {x!r} outside [0, 1]")
    if abs(sum(vec) - 1) > ROW_TOL:
        raise LinkageError(f"{what}: sums to {float(sum(vec))!r}, not 1")


@dataclass(frozen=True)
class LinkageDistribution:
    rows: tuple[IoiId, ...]
    cols: tuple[IoiId, ...]
    p: tuple[tuple[Real, ...], ...]

    def __post_init__(self):
        _check_ioi_set(self.rows)
        _check_ioi_set(self.cols)
        if len(self.p) != len(self.rows):
            raise LinkageError("matrix row count does not match IOI set A")
        if not self.rows or not self.cols:
            raise LinkageError("IOI sets must be non-empty")
        for i, row in enumerate(self.p):
            if len(row) != len(self.cols):
                raise LinkageError(f"row {i} has {len(row)} entries, expected {len(self.cols)}")
            _check_simplex(row, f"row {i}")

    @property
    def n_a(self) -> int:
        return len(self.rows)

    @property
    def n_b(self) -> int:
        return len(self.cols)

    @classmethod
    def from_matrix(cls, matrix: Iterable[Iterable[Real]], *,
                    row_kind: IoiKind = IoiKind.MESSAGE,
                    col_kind: IoiKind = IoiKind.SUBJECT,
                    normalize: bool = False) -> "LinkageDistribution":
        """Build from a nested sequence; rows are renormalized only if ``normalize``."""
        p = [tuple(r) for r in matrix]
        if normalize:
            out = []
            for r in p:
                s = sum(r)
                if s <= 0:
                    raise LinkageError("cannot normalize a zero row")
                out.append(tuple(x / s for x in r))
            p = out
        n_b = len(p[0]) if p else 0
        return cls(ioi_set(row_kind, len(p)), ioi_set(col_kind, n_b), tuple(p))

    @classmethod
    def uniform(cls, n_a: int, n_b: int, *, exact: bool = True, **kw) -> "LinkageDistribution":
        x = Fraction(1, n_b) if exact else 1.0 / n_b
        return cls.from_matrix([[x] * n_b for _ in range(n_a)], **kw)

    @classmethod
    def identity(cls, n: int, **kw) -> "LinkageDistribution":
        return cls.from_matrix(
            [[Fraction(int(i == j)) for j in range(n)] for i in range(n)], **kw)

    def is_row_uniform(self, tol: float = 0.0) -> bool:
        u = Fraction(1, self.n_b)
        return all(abs(x - u) <= tol for row in self.p for x in row)


def deviation_from_uniform(dist: LinkageDistribution, row: int) -> Real:
    """Total-variation distance between ``dist.p[row]`` and the uniform row.

    0 is perfectly unlinkable; ``(n_B - 1) / n_B`` is a certain link.
    """
    if not 0 <= row < dist.n_a:
        raise IndexError(f"row {row} out of range for {dist.n_a} rows")
    u = Fraction(1, dist.n_b)
    vals = dist.p[row]
    if any(isinstance(x, float) for x in vals):
        u = 1.0 / dist.n_b
    return sum(abs(x - u) for x in vals) / 2


def is_unlinkable(dist: LinkageDistribution, epsilon: float = DEFAULT_EPSILON) -> bool:
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    return all(deviation_from_uniform(dist, i) < epsilon for i in range(dist.n_a))


def transpose_linkage(dist: LinkageDistribution) -> LinkageDistribution:
    """Invert an A->B distribution into B->A by Bayes, with a uniform prior on A."""
    n_a, n_b = dist.n_a, dist.n_b
    prior = Fraction(1, n_a)
    if any(isinstance(x, float) for r in dist.p for x in r):
        prior = 1.0 / n_a
    joint = [[prior * dist.p[i][j] for j in range(n_b)] for i in range(n_a)]
    out = []
    for j in range(n_b):
        col_mass = sum(joint[i][j] for i in range(n_a))
        if col_mass == 0:
            raise LinkageError(f"column {j} has zero mass; conditional undefined")
        out.append(tuple(joint[i][j] / col_mass for i in range(n_a)))
    return LinkageDistribution(dist.cols, dist.rows, tuple(out))


def compose_linkage(ab: LinkageDistribution, bc: LinkageDistribution) -> LinkageDistribution:
    """Chain A->B and B->C assuming the two hops are independent."""
    if ab.n_b != bc.n_a:
        raise LinkageError(f"dimension mismatch: {ab.n_b} != {bc.n_a}")
    out = []
    for i in range(ab.n_a):
        out.append(tuple(
            sum(ab.p[i][j] * bc.p[j][k] for j in range(ab.n_b))
            for k in range(bc.n_b)))
    return LinkageDistribution(ab.rows, bc.cols, tuple(out))


def sender_unlinkability_product(pa: Sequence[Real], pb: Sequence[Real]) -> Real:
    """Probability that two messages share a sender, given per-message sender beliefs."""
    if len(pa) != len(pb):
        raise LinkageError("sender vectors differ in length")
    _check_simplex(pa, "pa")
    _check_simplex(pb, "pb")
    return sum(x * y for x, y in zip(pa, pb))


def converse_counterexamples(n: int = 3, steps: int = 5) -> list[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]]:
    """Search a rational grid for pairs with inner product 1/n where not both are uniform.

    Diagnostic only: shows that a product of 1/n does not force both sender
    distributions to be uniform.
    """
    grid = []
    for combo in itertools.product(range(steps + 1), repeat=n - 1):
        if sum(combo) <= steps:
            vec = tuple(Fraction(c, steps) for c in combo)
            grid.append(vec + (1 - sum(vec),))
    uniform = tuple(Fraction(1, n) for _ in range(n))
    if uniform not in grid:
        grid.append(uniform)
    target = Fraction(1, n)
    found = []
    for pa in grid:
        for pb in grid:
            if sum(x * y for x, y in zip(pa, pb)) == target and not (pa == uniform and pb == uniform):
                found.append((pa, pb))
    return found


# -- anonymity --------------------------------------------------------------

def anonymity_deviation(probs: Sequence[Real]) -> Real:
    """TV distance of a belief over subjects from ``1/(number of subjects)``."""
    _check_simplex(probs, "probs")
    row = LinkageDistribution.from_matrix([probs])
    return deviation_from_uniform(row, 0)


def is_sender_anonymous(sender_probs: Sequence[Real], epsilon: float = DEFAULT_EPSILON) -> bool:
    return anonymity_deviation(sender_probs) < epsilon


def is_recipient_anonymous(recipient_probs: Sequence[Real], epsilon: float = DEFAULT_EPSILON) -> bool:
    return anonymity_deviation(recipient_probs) < epsilon


def relationship_probabilities(sender_probs: Sequence[Real],
                               recipient_probs: Sequence[Real]) -> list[Real]:
    """Flattened belief over (sender, recipient) pairs, senders-major."""
    _check_simplex(sender_probs, "sender_probs")
    _check_simplex(recipient_probs, "recipient_probs")
    return [s * r for s in sender_probs for r in recipient_probs]


def is_relationship_anonymous(sender_probs, recipient_probs, epsilon: float = DEFAULT_EPSILON) -> bool:
    return anonymity_deviation(relationship_probabilities(sender_probs, recipient_probs)) < epsilon


@dataclass
class AnonymitySet:
    """Subjects among which the target is indistinguishable; can only shrink."""

    members: frozenset[IoiId]
    history: list[frozenset[IoiId]] = field(default_factory=list)

    def __post_init__(self):
        self.members = frozenset(self.members)
        if not self.members:
            raise ValueError("anonymity set must be non-empty")
        if any(m.kind is not IoiKind.SUBJECT for m in self.members):
            raise ValueError("anonymity set members must be subjects")
        if not self.history:
            self.history.append(self.members)

    def __len__(self):
        return len(self.members)

    def restrict(self, consistent: Iterable[IoiId]) -> "AnonymitySet":
        """Keep only members consistent with a new observation.

        Members outside the current set are ignored, so the set never grows.
        An observation that would empty the set is rejected.
        """
        new = self.members & frozenset(consistent)
        if not new:
            raise ValueError("observation eliminates every member")
        self.members = new
        self.history.append(new)
        return self

    def exclude(self, ruled_out: Iterable[IoiId]) -> "AnonymitySet":
        return self.restrict(self.members - frozenset(ruled_out))


# -- self-check ---------------------------------------------------------------

@dataclass(frozen=True)
class TheoremCheck:
    name: str
    passed: bool
    detail: str


def _random_stochastic(rng, n_a: int, n_b: int) -> LinkageDistribution:
    rows = []
    for _ in range(n_a):
        w = [rng.random() + 1e-3 for _ in range(n_b)]
        s = sum(w)
        rows.append([x / s for x in w])
    return LinkageDistribution.from_matrix(rows)


def _row_sums_ok(d: LinkageDistribution) -> bool:
    return all(abs(sum(r) - 1) <= ROW_TOL for r in d.p)


def theorem_checks(*, max_dim: int = 8, samples: int = 1000, seed: int = 0) -> list[TheoremCheck]:
    """Executable checks of the linkage algebra.

    Symmetry and transitivity of uniform linkage are checked exactly for every
    dimension up to ``max_dim``; row-stochasticity on ``samples`` random
    float matrices; the uniform-product identity exactly for n = 2..6; and
    the search for converse counterexamples must find (0.6, 0.2, 0.2).
    """
    import random
    rng = random.Random(seed)
    dims = range(1, max_dim + 1)
    out = []

    bad = [(a, b) for a in dims for b in dims
           if transpose_linkage(LinkageDistribution.uniform(a, b)).p
           != LinkageDistribution.uniform(b, a).p]
    out.append(TheoremCheck("symmetry: uniform transposes to uniform", not bad,
                            f"dims 1..{max_dim}; failures {bad[:3]}"))

    bad = [(a, b, c) for a in dims for b in dims for c in dims
           if compose_linkage(LinkageDistribution.uniform(a, b), LinkageDistribution.uniform(b, c)).p
           != LinkageDistribution.uniform(a, c).p]
    out.append(TheoremCheck("transitivity: uniform composes to uniform", not bad,
                            f"dims 1..{max_dim}; failures {bad[:3]}"))

    worst = 0.0
    for _ in range(samples):
        a, b, c = (rng.randint(1, max_dim) for _ in range(3))
        ab, bc = _random_stochastic(rng, a, b), _random_stochastic(rng, b, c)
        for d in (transpose_linkage(ab), compose_linkage(ab, bc)):
            worst = max(worst, max(abs(sum(r) - 1) for r in d.p))
    out.append(TheoremCheck("row-stochasticity preserved", worst <= ROW_TOL,
                            f"{samples} random pairs; worst row error {worst:.2e}"))

    bad = [n for n in range(2, 7)
           if sender_unlinkability_product([Fraction(1, n)] * n, [Fraction(1, n)] * n) != Fraction(1, n)]
    out.append(TheoremCheck("uniform senders give product 1/n", not bad, f"n = 2..6; failures {bad}"))

    target = (Fraction(3, 5), Fraction(1, 5), Fraction(1, 5))
    found = converse_counterexamples(3)
    hit = any(target in pair for pair in found)
    out.append(TheoremCheck("converse fails: non-uniform pair with product 1/n", hit,
                            f"{len(found)} counterexamples on the 1/5 grid; (0.6, 0.2, 0.2) found: {hit}"))
    return out
