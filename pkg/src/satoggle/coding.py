"""Bus-invert coding over a 16-bit weight bus, with optional segmentation.

Each segment of the bus carries either the raw bits or their complement,
whichever differs from the segment's current wire state in fewer positions;
a per-segment sideband inversion bit tells the decoder which.  Inversion
happens only when strictly more than half the segment's wires would toggle,
so a tie keeps the raw polarity.  Wires and inversion bits reset to zero.

The default layout covers only the mantissa field (offset 0, width 7):
mantissa bits of trained weights look close to uniform, which is where
bus-invert pays, while exponent bits of bounded weights barely move and
are cheaper left raw.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .bf16 import WORD_BITS, hamming


@dataclass(frozen=True)
class SegmentLayout:
    """Disjoint (offset, width) bit ranges of the bus covered by coding."""

    segments: tuple[tuple[int, int], ...] = ((0, 7),)

    def __post_init__(self):
        covered = 0
        for offset, width in self.segments:
            if width < 1 or offset < 0 or offset + width > WORD_BITS:
                raise ValueError(f"segment {(offset, width)} outside a {WORD_BITS}-bit bus")
            mask = ((1 << width) - 1) << offset
            if covered & mask:
                raise ValueError(f"segment {(offset, width)} overlaps another segment")
            covered |= mask
        if len(self.segments) > WORD_BITS:
            raise ValueError("more inversion bits than bus wires")

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(((1 << w) - 1) << off for off, w in self.segments)

    @property
    def covered_mask(self) -> int:
        m = 0
        for seg in self.masks:
            m |= seg
        return m

    @classmethod
    def parse(cls, text: str) -> "SegmentLayout":
        """Parse 'offset:width[,offset:width...]', e.g. '0:7' or '0:4,4:4'."""
        segments = []
        for part in text.split(","):
            part = part.strip()
            try:
                offset_s, width_s = part.split(":")
                segments.append((int(offset_s), int(width_s)))
            except ValueError:
                raise ValueError(f"bad segment spec {part!r}, expected offset:width") from None
        return cls(tuple(segments))

    def spec_string(self) -> str:
        return ",".join(f"{off}:{w}" for off, w in self.segments)


DEFAULT_LAYOUT = SegmentLayout()


@dataclass
class BusState:
    """What is physically on the bus: wire pattern plus inversion sideband."""

    wire: int = 0
    inv: int = 0  # bit s set == segment s currently inverted
    layout: SegmentLayout = field(default_factory=SegmentLayout)


def bic_encode(state: BusState, raw: int) -> tuple[BusState, int, int]:
    """Drive one word; returns (new state, data toggles, inv-bit toggles).

    Toggles are counted against the current wire state, because that is
    what the transition burns charge against, not against the previous
    raw word.
    """
    if not 0 <= raw < (1 << WORD_BITS):
        raise ValueError("raw word does not fit the bus")
    new_wire = raw
    new_inv = 0
    for s, (offset, width) in enumerate(state.layout.segments):
        mask = ((1 << width) - 1) << offset
        flips = ((state.wire ^ raw) & mask).bit_count()
        if 2 * flips > width:
            new_wire ^= mask
            new_inv |= 1 << s
    data_toggles = hamming(state.wire, new_wire)
    inv_toggles = hamming(state.inv, new_inv)
    return BusState(new_wire, new_inv, state.layout), data_toggles, inv_toggles


def bic_decode(wire: int, inv: int, layout: SegmentLayout) -> int:
    """Recover the raw word from the wire pattern and inversion bits."""
    raw = wire
    for s, mask in enumerate(layout.masks):
        if inv & (1 << s):
            raw ^= mask
    return raw


def expected_uniform_toggles(width: int) -> Fraction:
    """Mean data toggles per word on one coded segment fed iid uniform bits.

    The toggle count is min(h, width - h) with h binomial(width, 1/2):
    sum over h of C(width, h) * min(h, width - h) / 2^width.
    """
    if width < 1:
        raise ValueError("segment width must be positive")
    total = sum(comb(width, h) * min(h, width - h) for h in range(width + 1))
    return Fraction(total, 2**width)


# ---------------------------------------------------------------------------
# Vectorized twins used by the array core (one entry per column).

def bic_encode_vec(cur_wire: np.ndarray, raw: np.ndarray,
                   layout: SegmentLayout) -> tuple[np.ndarray, np.ndarray]:
    """Encode a row of independent buses at once; returns (wire, inv) arrays."""
    new_wire = np.asarray(raw, dtype=np.uint16).copy()
    new_inv = np.zeros_like(new_wire)
    diff = cur_wire ^ new_wire
    for s, (offset, width) in enumerate(layout.segments):
        mask = np.uint16(((1 << width) - 1) << offset)
        flips = np.bitwise_count(diff & mask)
        invert = (2 * flips.astype(np.int32)) > width
        new_wire ^= np.where(invert, mask, np.uint16(0))
        new_inv |= np.where(invert, np.uint16(1 << s), np.uint16(0))
    return new_wire, new_inv


def bic_decode_vec(wire: np.ndarray, inv: np.ndarray,
                   layout: SegmentLayout) -> np.ndarray:
    raw = np.asarray(wire, dtype=np.uint16).copy()
    for s, mask in enumerate(layout.masks):
        raw ^= np.where((inv >> s) & 1, np.uint16(mask), np.uint16(0))
    return raw
