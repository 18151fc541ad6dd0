"""Proximity scaling and compilation of weights into interleaving plans.

A weight distribution cannot be handed to the OS directly: mainstream
kernels only offer *uniform* interleaving over a node set.  The compiler
here tiles a memory segment into contiguous sub-ranges and interleaves each
sub-range uniformly over a shrinking node set.  Visiting nodes in ascending
weight order and giving the k-th sub-range a size of

    |remaining nodes| * (w_(k) - w_(k-1)) * segment_length

makes the overall per-node page shares come out exactly proportional to the
weights (pre-rounding); see ``weighted_subranges``, which works with any
numeric type including ``fractions.Fraction`` so the identity can be checked
exactly.

The proximity factor (a scalar in [0, 1]) interpolates between the canonical
distribution (0) and placing all pages on the worker nodes (1), linearly in
the aggregate worker mass and preserving the relative weights inside the
worker and non-worker sets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .canonical import WeightDistribution
from .errors import InfeasiblePlanError, ValidationError

DEFAULT_PAGE_SIZE = 4096


@dataclass(frozen=True)
class Dwp:
    """Data-to-worker proximity factor."""

    value: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValidationError(f"proximity factor must lie in [0, 1], got {self.value}")


@dataclass(frozen=True)
class Segment:
    """A contiguous byte range to be placed; offsets are segment-relative."""

    start: int
    length: int

    def __post_init__(self):
        if self.length <= 0:
            raise ValidationError(f"segment length must be positive, got {self.length}")
        if self.start < 0:
            raise ValidationError(f"segment start must be non-negative, got {self.start}")


@dataclass(frozen=True)
class Directive:
    """Uniformly interleave [start, start+length) over ``nodes``."""

    start: int
    length: int
    nodes: frozenset[int]


@dataclass(frozen=True, eq=True)
class InterleavePlan:
    """Ordered directives tiling a segment; node sets shrink front to back."""

    directives: tuple[Directive, ...]
    page_size: int

    @property
    def start(self) -> int:
        return self.directives[0].start

    @property
    def length(self) -> int:
        return sum(d.length for d in self.directives)


@dataclass(frozen=True)
class Move:
    start: int
    length: int
    from_nodes: frozenset[int]
    to_nodes: frozenset[int]


@dataclass(frozen=True)
class MigrationSet:
    moves: tuple[Move, ...]


def apply_dwp(canonical: WeightDistribution, workers, dwp: Dwp) -> WeightDistribution:
    """Scale a canonical distribution toward the worker nodes.

    The aggregate worker mass moves linearly from its canonical value to 1
    as the factor goes 0 -> 1; relative weights within the worker set and
    within the non-worker set are preserved.
    """
    w = canonical.weights
    mask = np.zeros(len(canonical), dtype=bool)
    for i in workers:
        if not 0 <= i < len(canonical):
            raise ValidationError(f"worker node {i} out of range [0, {len(canonical)})")
        mask[i] = True
    if not mask.any():
        raise ValidationError("worker set must be non-empty")
    if mask.all():
        # No non-worker nodes: the proximity factor has nothing to shift.
        return canonical
    worker_mass = float(w[mask].sum())
    if worker_mass <= 0.0:
        if dwp.value > 0.0:
            raise ValidationError("canonical worker mass is zero; cannot scale toward workers")
        return canonical
    target = worker_mass + dwp.value * (1.0 - worker_mass)
    out = np.empty_like(w)
    out[mask] = w[mask] * (target / worker_mass)
    nonworker_mass = 1.0 - worker_mass
    out[~mask] = w[~mask] * ((1.0 - target) / nonworker_mass)
    return WeightDistribution(out)


def weighted_subranges(weights: Sequence, length):
    """Exact sub-range decomposition behind the plan compiler.

    Returns ``[(size, nodes), ...]`` before any page rounding.  Arithmetic is
    generic: pass ``Fraction`` weights and length to get exact sizes.  Nodes
    with zero weight are dropped; ties on weight break by lowest node index.
    """
    remaining = [i for i, w in enumerate(weights) if w > 0]
    if not remaining:
        raise ValidationError("distribution has no positive weights")
    order = sorted(remaining, key=lambda i: (weights[i], i))
    subranges = []
    prev_weight = 0
    alive = set(remaining)
    for node in order:
        size = len(alive) * (weights[node] - prev_weight) * length
        if size > 0:
            subranges.append((size, frozenset(alive)))
        alive.remove(node)
        prev_weight = weights[node]
    return subranges


def build_plan(segment: Segment, dist: WeightDistribution, page_size: int = DEFAULT_PAGE_SIZE) -> InterleavePlan:
    """Compile a weight distribution into an interleaving plan over a segment.

    Sub-range boundaries are rounded down to page multiples and the final
    boundary is pinned to the segment end, so the plan tiles the segment
    exactly and each node's page count is within one page per directive of
    its exact share.
    """
    if page_size <= 0:
        raise ValidationError(f"page size must be positive, got {page_size}")
    if segment.start % page_size or segment.length % page_size:
        raise ValidationError("segment start and length must be multiples of the page size")
    total_pages = segment.length // page_size
    nonzero = int(np.count_nonzero(dist.weights > 0))
    if total_pages < nonzero:
        raise InfeasiblePlanError(
            f"segment holds {total_pages} pages but the distribution has {nonzero} nonzero-weight nodes"
        )
    # limit_denominator snaps binary-float weights back to the intended
    # rationals (0.3 as a float is slightly below 3/10, which would floor a
    # 20-page sub-range down to 19 pages).
    exact_weights = [Fraction(float(w)).limit_denominator(10**9) for w in dist.weights]
    subranges = weighted_subranges(exact_weights, Fraction(segment.length))
    # Round cumulative sub-range boundaries down to page multiples (the last
    # one is pinned to the segment end).  Flooring the cumulative boundary,
    # rather than each size, keeps rounded boundaries monotone in the exact
    # ones, which is what makes proximity increases shrink node sets even at
    # page granularity.
    directives = []
    cum = Fraction(0)
    prev_boundary = 0
    for k, (size, nodes) in enumerate(subranges):
        cum += size
        if k == len(subranges) - 1:
            boundary = segment.length
        else:
            boundary = (int(cum) // page_size) * page_size
        if boundary > prev_boundary:
            directives.append(Directive(segment.start + prev_boundary, boundary - prev_boundary, nodes))
            prev_boundary = boundary
    return InterleavePlan(directives=tuple(directives), page_size=page_size)


def plan_page_counts(plan: InterleavePlan, node_count: int | None = None) -> np.ndarray:
    """Pages each node receives; round-robin remainders go to lowest indices first."""
    if node_count is None:
        node_count = 1 + max(max(d.nodes) for d in plan.directives)
    counts = np.zeros(node_count, dtype=np.int64)
    for d in plan.directives:
        pages = d.length // plan.page_size
        members = sorted(d.nodes)
        base, extra = divmod(pages, len(members))
        for rank, node in enumerate(members):
            counts[node] += base + (1 if rank < extra else 0)
    return counts


def _boundaries(plan: InterleavePlan):
    points = [plan.directives[0].start]
    for d in plan.directives:
        points.append(d.start + d.length)
    return points


def _nodes_at(plan: InterleavePlan, offset: int) -> frozenset[int]:
    for d in plan.directives:
        if d.start <= offset < d.start + d.length:
            return d.nodes
    raise ValidationError(f"offset {offset} outside plan")


def diff_plans(old: InterleavePlan, new: InterleavePlan) -> MigrationSet:
    """Moves needed to turn the placement of ``old`` into that of ``new``.

    Both plans must cover the same segment with the same page size.  Adjacent
    sub-ranges with identical (from, to) node sets are merged into one move.
    """
    if old.page_size != new.page_size:
        raise ValidationError("plans use different page sizes")
    if old.start != new.start or old.length != new.length:
        raise ValidationError("plans cover different segments")
    cuts = sorted(set(_boundaries(old)) | set(_boundaries(new)))
    moves: list[Move] = []
    for lo, hi in zip(cuts, cuts[1:]):
        before = _nodes_at(old, lo)
        after = _nodes_at(new, lo)
        if before == after:
            continue
        if moves and moves[-1].from_nodes == before and moves[-1].to_nodes == after \
                and moves[-1].start + moves[-1].length == lo:
            prev = moves[-1]
            moves[-1] = Move(prev.start, prev.length + (hi - lo), before, after)
        else:
            moves.append(Move(lo, hi - lo, before, after))
    return MigrationSet(moves=tuple(moves))


def render_plan(plan: InterleavePlan) -> str:
    """Serialize a plan to its document form for an external applier."""
    doc = {
        "page_size": plan.page_size,
        "directives": [
            {"start": d.start, "length": d.length, "nodes": sorted(d.nodes)}
            for d in plan.directives
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_plan(text: str) -> InterleavePlan:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed plan document: {exc}") from exc
    if not isinstance(doc, dict) or set(doc) != {"page_size", "directives"}:
        raise ValidationError("plan document must contain exactly page_size and directives")
    directives = tuple(
        Directive(d["start"], d["length"], frozenset(d["nodes"])) for d in doc["directives"]
    )
    if not directives:
        raise ValidationError("plan must contain at least one directive")
    page_size = doc["page_size"]
    for d in directives:
        if d.length <= 0 or d.length % page_size or d.start % page_size or not d.nodes:
            raise ValidationError(f"invalid directive {d}")
    for a, b in zip(directives, directives[1:]):
        if a.start + a.length != b.start:
            raise ValidationError("directives must tile the segment contiguously")
    return InterleavePlan(directives=directives, page_size=page_size)
