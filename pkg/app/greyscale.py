"""
Exact grey tones, greyscales and the vectors derived from them.

A tone is a `fractions.Fraction` in [0, 1]; Fraction keeps lowest terms, so
equality and hashing are structural and "p/q" is its own string form.
"""
import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple, Union

from app.graph import UNREACHABLE, DistanceMatrix, DisconnectedGraphError, Edge, Graph, diameter_and_antipodal_pairs

Tone = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

_TONE_TEXT = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+)\s*)?$")


class ToneError(ValueError):
    pass


def make_tone(value: Union[int, Fraction, str]) -> Fraction:
    if isinstance(value, str):
        return tone_from_string(value)
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise ToneError(f"Tones must be exact rationals, got {value!r}")
    tone = Fraction(value)
    if not ZERO <= tone <= ONE:
        raise ToneError(f"Tone {tone} outside [0, 1]")
    return tone


def tone_from_string(text: str) -> Fraction:
    match = _TONE_TEXT.match(text)
    if not match:
        raise ToneError(f"Malformed tone {text!r}; expected 'p/q' or 'p'")
    numerator, denominator = int(match.group(1)), int(match.group(2) or 1)
    if denominator == 0:
        raise ToneError(f"Zero denominator in tone {text!r}")
    return make_tone(Fraction(numerator, denominator))


def tone_to_string(tone: Fraction) -> str:
    return str(Fraction(tone))


@dataclass(frozen=True)
class Greyscale:
    tones: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, 'tones', tuple(make_tone(t) for t in self.tones))

    @classmethod
    def from_strings(cls, texts: Iterable[str]) -> "Greyscale":
        return cls(tuple(tone_from_string(text) for text in texts))

    def __len__(self) -> int:
        return len(self.tones)

    def __getitem__(self, v: int) -> Fraction:
        return self.tones[v]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.tones)

    def to_strings(self) -> Tuple[str, ...]:
        return tuple(tone_to_string(t) for t in self.tones)


@dataclass(frozen=True)
class IncompleteGreyscale:
    """Prefixed tones on the vertex subset V_c, stored as sorted (vertex, tone) items."""

    items: Tuple[Tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        cleaned: Dict[int, Fraction] = {}
        for v, tone in self.items:
            if v in cleaned:
                raise ToneError(f"Vertex {v} prefixed twice")
            cleaned[int(v)] = make_tone(tone)
        object.__setattr__(self, 'items', tuple(sorted(cleaned.items())))

    @classmethod
    def from_mapping(cls, fixed: Mapping[int, Union[Fraction, int, str]]) -> "IncompleteGreyscale":
        return cls(tuple((int(v), make_tone(t)) for v, t in fixed.items()))

    @property
    def domain(self) -> Tuple[int, ...]:
        return tuple(v for v, _ in self.items)

    def as_dict(self) -> Dict[int, Fraction]:
        return dict(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, v: int) -> bool:
        return any(u == v for u, _ in self.items)

    def __getitem__(self, v: int) -> Fraction:
        for u, tone in self.items:
            if u == v:
                return tone
        raise KeyError(v)

    def attains(self, tone: Fraction) -> bool:
        return any(t == tone for _, t in self.items)

    def vertices_with(self, tone: Fraction) -> Tuple[int, ...]:
        return tuple(v for v, t in self.items if t == tone)

    def extended(self, assignments: Mapping[int, Fraction]) -> "IncompleteGreyscale":
        merged = self.as_dict()
        for v, tone in assignments.items():
            if v in merged:
                raise ToneError(f"Vertex {v} is already prefixed")
            merged[v] = tone
        return IncompleteGreyscale.from_mapping(merged)

    def validate_for(self, g: Graph) -> None:
        for v in self.domain:
            if not 0 <= v < g.n:
                raise ToneError(f"Prefixed vertex {v} out of range for n={g.n}")


@dataclass(frozen=True)
class GradationVector:
    components: Tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.components)

    def to_strings(self) -> Tuple[str, ...]:
        return tuple(tone_to_string(t) for t in self.components)


class Ordering(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


ToneLookup = Union[Greyscale, Sequence[Fraction], Mapping[int, Fraction]]


def edge_tone(f: ToneLookup, e: Edge) -> Fraction:
    u, v = e
    return abs(f[u] - f[v])


def _edge_tones(g: Graph, f: Greyscale) -> list:
    if len(f) != g.n:
        raise ValueError(f"Greyscale covers {len(f)} vertices, graph has {g.n}")
    return [edge_tone(f, e) for e in g.edges]


def gradation_vector(g: Graph, f: Greyscale) -> GradationVector:
    return GradationVector(tuple(sorted(_edge_tones(g, f), reverse=True)))


def contrast_vector(g: Graph, f: Greyscale) -> Tuple[Fraction, ...]:
    return tuple(sorted(_edge_tones(g, f)))


def compare_lex(a: GradationVector, b: GradationVector) -> Ordering:
    """LESS means `a` has the better (smaller) gradation."""
    if len(a) != len(b):
        raise ValueError(f"Cannot compare vectors of lengths {len(a)} and {len(b)}")
    for x, y in zip(a, b):
        if x != y:
            return Ordering.LESS if x < y else Ordering.GREATER
    return Ordering.EQUAL


def complement(f: Greyscale) -> Greyscale:
    return Greyscale(tuple(ONE - t for t in f))


def is_valid_greyscale(g: Graph, f: Greyscale) -> Tuple[bool, str]:
    if len(f) != g.n:
        return False, f"greyscale covers {len(f)} vertices, graph has {g.n}"
    for v, tone in enumerate(f):
        if not ZERO <= tone <= ONE:
            return False, f"tone of vertex {v} outside [0, 1]"
    missing = [name for name, tone in (("0", ZERO), ("1", ONE)) if tone not in f.tones]
    if len(missing) == 2:
        return False, "tones 0 and 1 not attained"
    if missing:
        return False, f"tone {missing[0]} not attained"
    return True, ""


def is_compatible(f: Greyscale, g: IncompleteGreyscale) -> bool:
    return all(v < len(f) and f[v] == tone for v, tone in g.items)


def support_greyscale(g: Graph, d: DistanceMatrix, u: int, v: int) -> Greyscale:
    """The distance-based greyscale (d(w,u) - d(w,v) + d(G)) / (2 d(G)) for antipodal u, v."""
    diameter, _ = diameter_and_antipodal_pairs(g, d)
    if u == v or d.distance(u, v) != diameter:
        raise ValueError(f"Vertices {u} and {v} are not antipodal (diameter {diameter})")
    return Greyscale(tuple(
        Fraction(d.distance(w, u) - d.distance(w, v) + diameter, 2 * diameter) for w in range(g.n)
    ))


def edge_colour_increase(f: ToneLookup, d: DistanceMatrix, u: int, v: int) -> Fraction:
    """F(u, v) = |f(u) - f(v)| / d(u, v), with F(u, u) = 0."""
    if u == v:
        return ZERO
    length = d[u, v]
    if length is UNREACHABLE:
        raise DisconnectedGraphError(f"Vertices {u} and {v} lie in different components")
    return abs(f[u] - f[v]) / length
