"""Finite two-level information model on atoms x [0, 1].

The sample space is Omega = A x [0, 1]: a finite set of weighted atoms (the
coarse level, carrying a payoff point each) refined by a uniform coordinate
U on [0, 1] (the fine level).  Coarse-level information knows the atom; the
fine level also knows U.  Events measurable at the fine level are stored per
atom as disjoint unions of closed subintervals of [0, 1], and conditional
expectations given the coarse level reduce to exact interval-length sums.

Two families of events matter downstream:

* ``b_t_event`` puts [0, t] on every atom, so its conditional probability is
  the constant t: the model is conditionally atomless, with a whole
  continuum of events between the empty set and Omega.
* ``u_le_h_event`` puts [0, h(atom)] on each atom, realizing any prescribed
  conditional probability profile h; this is the event {U <= h} used to mix
  two-point laws with exact per-atom weights.

``atomless_split`` halves every interval of an event, producing a sub-event
whose conditional probability is strictly between zero and the original on
every atom that had positive probability.  ``sample_u`` draws (atom, u)
pairs from the product measure through the counter-based word stream, so
sample i is a pure function of (seed, i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import InvalidEventError, InvalidInputError
from .geometry import Point2
from .rng import raw_words

__all__ = [
    "Atom",
    "FiltrationModel",
    "EventF2",
    "CondExpectation",
    "cond_exp_indicator",
    "b_t_event",
    "u_le_h_event",
    "atomless_split",
    "sample_u",
    "sample_u_arrays",
]

#: Construction-level slack on the total atom weight.  CSV ingestion
#: renormalizes at a much looser 1e-6; after renormalization the float sum
#: of up to ~10^5 weights lands well inside this.
WEIGHT_SUM_TOL = 1e-12

_U53 = np.float64(2.0 ** -53)
_SHIFT11 = np.uint64(11)


@dataclass(frozen=True, slots=True)
class Atom:
    """A coarse-level atom: identifier, probability weight, payoff point."""

    id: str
    weight: float
    payoff: Point2

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise InvalidInputError(f"atom id must be a nonempty string, got {self.id!r}")
        w = float(self.weight)
        if not math.isfinite(w) or not 0.0 < w <= 1.0:
            raise InvalidInputError(f"atom {self.id!r}: weight must be in (0, 1], got {self.weight!r}")
        object.__setattr__(self, "weight", w)
        if not isinstance(self.payoff, Point2):
            raise InvalidInputError(f"atom {self.id!r}: payoff must be a Point2")


class FiltrationModel:
    """An ordered collection of atoms whose weights sum to one."""

    __slots__ = ("atoms", "_index")

    def __init__(self, atoms: Sequence[Atom]) -> None:
        atoms = tuple(atoms)
        if not atoms:
            raise InvalidInputError("model needs at least one atom")
        index: dict[str, int] = {}
        for i, atom in enumerate(atoms):
            if not isinstance(atom, Atom):
                raise InvalidInputError("model atoms must be Atom instances")
            if atom.id in index:
                raise InvalidInputError(f"duplicate atom id {atom.id!r}")
            index[atom.id] = i
        total = math.fsum(a.weight for a in atoms)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidInputError(f"atom weights must sum to 1 within {WEIGHT_SUM_TOL}, got {total!r}")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "_index", index)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("FiltrationModel is immutable")

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.atoms)

    def ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.atoms)

    def atom(self, atom_id: str) -> Atom:
        try:
            return self.atoms[self._index[atom_id]]
        except KeyError:
            raise InvalidInputError(f"unknown atom id {atom_id!r}") from None

    def weights(self) -> np.ndarray:
        return np.array([a.weight for a in self.atoms], dtype=np.float64)


def _normalize_intervals(atom_id: str, raw: Sequence[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    checked: list[tuple[float, float]] = []
    for pair in raw:
        if len(pair) != 2:
            raise InvalidEventError(f"atom {atom_id!r}: intervals must be (lo, hi) pairs")
        lo, hi = float(pair[0]), float(pair[1])
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise InvalidEventError(f"atom {atom_id!r}: interval bounds must be finite")
        if not 0.0 <= lo <= hi <= 1.0:
            raise InvalidEventError(f"atom {atom_id!r}: need 0 <= lo <= hi <= 1, got ({lo!r}, {hi!r})")
        if lo == hi:
            continue  # zero length carries no probability
        checked.append((lo, hi))
    checked.sort()
    merged: list[tuple[float, float]] = []
    for lo, hi in checked:
        if merged and lo < merged[-1][1]:
            raise InvalidEventError(f"atom {atom_id!r}: intervals overlap near {lo!r}")
        if merged and lo == merged[-1][1]:
            merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return tuple(merged)


@dataclass(frozen=True, slots=True)
class EventF2:
    """A fine-level event: per-atom disjoint interval unions inside [0, 1].

    Construction normalizes each atom's list (sorts, drops zero-length
    pieces, merges touching neighbors) and rejects overlaps.  Atoms absent
    from the mapping carry the empty set.
    """

    intervals: Mapping[str, tuple[tuple[float, float], ...]]

    def __post_init__(self) -> None:
        if not isinstance(self.intervals, Mapping):
            raise InvalidEventError("intervals must map atom ids to (lo, hi) lists")
        norm: dict[str, tuple[tuple[float, float], ...]] = {}
        for atom_id, raw in self.intervals.items():
            if not isinstance(atom_id, str) or not atom_id:
                raise InvalidEventError(f"atom id must be a nonempty string, got {atom_id!r}")
            pieces = _normalize_intervals(atom_id, tuple(raw))
            if pieces:
                norm[atom_id] = pieces
        object.__setattr__(self, "intervals", norm)

    def measure(self, atom_id: str) -> float:
        """Lebesgue measure of the event's slice over one atom."""
        return math.fsum(hi - lo for lo, hi in self.intervals.get(atom_id, ()))


@dataclass(frozen=True, slots=True)
class CondExpectation:
    """Per-atom conditional expectation values, keyed by atom id."""

    by_atom: Mapping[str, float]

    def __getitem__(self, atom_id: str) -> float:
        return self.by_atom[atom_id]

    def items(self):
        return self.by_atom.items()


def _require_known_ids(model: FiltrationModel, event: EventF2) -> None:
    unknown = set(event.intervals) - set(model.ids())
    if unknown:
        raise InvalidEventError(f"event references unknown atom ids {sorted(unknown)!r}")


def cond_exp_indicator(model: FiltrationModel, event: EventF2) -> CondExpectation:
    """Conditional expectation of the event's indicator given the atom.

    Exact per-atom interval-length sums; every value lies in [0, 1].
    """
    _require_known_ids(model, event)
    return CondExpectation({a.id: event.measure(a.id) for a in model.atoms})


def b_t_event(model: FiltrationModel, t: float) -> EventF2:
    """The event with slice [0, t] on every atom.

    Its conditional probability is identically t, witnessing that the model
    is conditionally atomless: t sweeps a continuum of events from the empty
    set (t=0) to all of Omega (t=1).
    """
    t = float(t)
    if not math.isfinite(t) or not 0.0 <= t <= 1.0:
        raise InvalidInputError(f"t must be in [0, 1], got {t!r}")
    if t == 0.0:
        return EventF2({})
    return EventF2({a.id: ((0.0, t),) for a in model.atoms})


def u_le_h_event(model: FiltrationModel, h: Mapping[str, float]) -> EventF2:
    """The event {U <= h(atom)} for a per-atom level function h into [0, 1].

    Its conditional probability reproduces h exactly: the slice over atom a
    is [0, h(a)], of length h(a).
    """
    if not isinstance(h, Mapping):
        raise InvalidInputError("h must map atom ids to levels in [0, 1]")
    ids = model.ids()
    missing = set(ids) - set(h)
    if missing:
        raise InvalidInputError(f"h is missing atom ids {sorted(missing)!r}")
    extra = set(h) - set(ids)
    if extra:
        raise InvalidInputError(f"h references unknown atom ids {sorted(extra)!r}")
    out: dict[str, tuple[tuple[float, float], ...]] = {}
    for atom_id in ids:
        level = float(h[atom_id])
        if not math.isfinite(level) or not 0.0 <= level <= 1.0:
            raise InvalidInputError(f"atom {atom_id!r}: level must be in [0, 1], got {h[atom_id]!r}")
        if level > 0.0:
            out[atom_id] = ((0.0, level),)
    return EventF2(out)


def atomless_split(model: FiltrationModel, event: EventF2) -> EventF2:
    """A strict sub-event keeping the left half of each interval.

    On every atom where the event has positive probability, the result's
    probability is strictly between zero and the event's.  Raises when an
    interval is too narrow to split at float resolution (width one ulp).
    """
    _require_known_ids(model, event)
    out: dict[str, list[tuple[float, float]]] = {}
    for atom_id, pieces in event.intervals.items():
        halves: list[tuple[float, float]] = []
        for lo, hi in pieces:
            mid = lo + (hi - lo) / 2.0
            if mid <= lo or mid >= hi:
                raise InvalidEventError(
                    f"atom {atom_id!r}: interval ({lo!r}, {hi!r}) is too narrow to split"
                )
            halves.append((lo, mid))
        out[atom_id] = halves
    return EventF2(out)


def sample_u_arrays(
    model: FiltrationModel, count: int, seed: int, start: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Atom indices and uniform draws for samples [start, start+count).

    Sample i consumes stream words 2i (atom selector) and 2i+1 (the uniform
    coordinate u), so any sample is reproducible from (seed, i) alone.
    """
    if not isinstance(count, int) or count < 0:
        raise InvalidInputError(f"count must be a nonnegative int, got {count!r}")
    if not isinstance(start, int) or start < 0:
        raise InvalidInputError(f"start must be a nonnegative int, got {start!r}")
    words = raw_words(seed, 2 * start, 2 * count)
    sel = (words[0::2] >> _SHIFT11).astype(np.float64) * _U53
    u = (words[1::2] >> _SHIFT11).astype(np.float64) * _U53
    cum = np.cumsum(model.weights())
    cum[-1] = 1.0  # pin the top so sel < 1 always lands on a real atom
    idx = np.searchsorted(cum, sel, side="right")
    return idx, u


def sample_u(model: FiltrationModel, count: int, seed: int) -> list[tuple[str, float]]:
    """Draw ``count`` (atom_id, u) pairs from the product measure."""
    idx, u = sample_u_arrays(model, count, seed)
    ids = model.ids()
    return [(ids[i], float(v)) for i, v in zip(idx.tolist(), u.tolist())]
