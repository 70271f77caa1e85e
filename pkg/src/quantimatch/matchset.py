"""Match sets: semiring values aggregated over regions of the match plane.

A region is a two-dimensional zone over the coordinates (t, t') of a
match start and end.  Regions from different harvests may overlap; a
point query folds every region containing the point, so the stored
table never needs geometric splitting.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import zone as zn
from .semiring import INF, Semiring


def format_time(x) -> str:
    """Rationals rendered as integers, exact decimals, or p/q."""
    if x == INF:
        return "inf"
    f = Fraction(x)
    if f.denominator == 1:
        return str(f.numerator)
    den = f.denominator
    d2 = d5 = 0
    while den % 2 == 0:
        den //= 2
        d2 += 1
    while den % 5 == 0:
        den //= 5
        d5 += 1
    if den != 1:
        return f"{f.numerator}/{f.denominator}"
    digits = max(d2, d5)
    scaled = abs(f.numerator) * 10**digits // f.denominator
    whole, frac = divmod(scaled, 10**digits)
    sign = "-" if f < 0 else ""
    return f"{sign}{whole}.{str(frac).rjust(digits, '0')}"


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    if v == int(v):
        return str(int(v))
    return repr(v)


def zone_sort_key(z: zn.Zone):
    """Structural ordering of zones, for deterministic output."""
    return tuple((b[0] == INF, b[0], b[1]) for row in z.m for b in row)


def _interval(lo_bound, hi_bound) -> str:
    # lo_bound constrains the negated coordinate, hi_bound the plain one
    left = "(" if lo_bound[1] else "["
    right = ")" if hi_bound[1] else "]"
    return f"{left}{format_time(-lo_bound[0])},{format_time(hi_bound[0])}{right}"


@dataclass(frozen=True)
class MatchPiece:
    region: zn.Zone
    value: object


def format_piece(piece: MatchPiece) -> str:
    m = piece.region.m
    t_iv = _interval(m[0][1], m[1][0])
    tp_iv = _interval(m[0][2], m[2][0])
    diff_iv = _interval(m[1][2], m[2][1])
    return f"t in {t_iv}, t' in {tp_iv}, t'-t in {diff_iv} : {format_value(piece.value)}"


class MatchSet:
    """Insertion-merged map from match-plane zones to semiring values."""

    def __init__(self, semiring: Semiring):
        self.semiring = semiring
        self._pieces: dict = {}
        self.horizon = Fraction(0)

    def __len__(self) -> int:
        return len(self._pieces)

    def insert(self, region: zn.Zone, value) -> bool:
        """Fold a value in; True when the stored table changed."""
        if region.m is None or value == self.semiring.zero:
            return False
        old = self._pieces.get(region)
        if old is None:
            self._pieces[region] = value
            return True
        merged = self.semiring.oplus(old, value)
        if merged == old:
            return False
        self._pieces[region] = merged
        return True

    def get(self, region: zn.Zone):
        return self._pieces.get(region, self.semiring.zero)

    def pieces(self) -> list:
        return [
            MatchPiece(r, v)
            for r, v in sorted(self._pieces.items(), key=lambda kv: zone_sort_key(kv[0]))
        ]

    def query(self, t, t_prime):
        """Fold every region containing the point (t, t')."""
        t, tp = Fraction(t), Fraction(t_prime)
        if not 0 <= t < tp:
            raise ValueError(f"need 0 <= t < t', got ({t}, {tp})")
        return self.semiring.big_oplus(
            v for r, v in self._pieces.items() if zn.contains(r, (t, tp))
        )

    def export_text(self, stream) -> None:
        for piece in self.pieces():
            stream.write(format_piece(piece) + "\n")

    def export_grid(self, stream, delta) -> None:
        """Tab-separated t, t', value samples on a delta grid."""
        delta = Fraction(delta)
        if delta <= 0:
            raise ValueError("delta must be positive")
        stream.write("t\tt'\tvalue\n")
        n = int(self.horizon / delta)
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                value = self.query(i * delta, j * delta)
                stream.write(
                    f"{format_time(i * delta)}\t{format_time(j * delta)}\t"
                    f"{format_value(value)}\n"
                )
