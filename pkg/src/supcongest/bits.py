"""Bit-string helpers. Messages are ``str`` objects over the alphabet ``"01"``."""

from __future__ import annotations

from typing import Iterable, List


def ceil_log2(n: int) -> int:
    """``ceil(log2 n)`` for ``n >= 1``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (n - 1).bit_length()


def id_bits(n: int) -> int:
    """Identifier width for an ``n``-node network: ``2 * ceil(log2 n)``, each factor clamped to 1."""
    return 2 * max(1, ceil_log2(n))


def encode_int(value: int, width: int) -> str:
    if value < 0 or value >= (1 << width):
        raise ValueError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


def decode_int(bits: str) -> int:
    return int(bits, 2) if bits else 0


def pack_ints(values: Iterable[int], width: int) -> str:
    return "".join(encode_int(v, width) for v in values)


def unpack_ints(bits: str, width: int) -> List[int]:
    if width <= 0 or len(bits) % width:
        raise ValueError(f"payload of {len(bits)} bits is not a multiple of {width}")
    return [int(bits[i:i + width], 2) for i in range(0, len(bits), width)]


def to_hex(bits: str) -> str:
    """Hex digits for a bit string (length is carried separately); ``-`` for empty."""
    if not bits:
        return "-"
    return format(int(bits, 2), "x")


def from_hex(digits: str, length: int) -> str:
    if digits == "-" or length == 0:
        return ""
    return format(int(digits, 16), f"0{length}b")


def is_bitstring(s: str) -> bool:
    return isinstance(s, str) and not s.strip("01")
