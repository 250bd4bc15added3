"""
Bit string helpers

Bit strings are plain ``str`` values over the alphabet {"0", "1"}, most
significant bit first, so string order equals numeric order for equal lengths.
"""

from typing import Iterator

from app.core.exceptions import LengthMismatchError


def is_bitstring(value: str) -> bool:
    return all(ch in "01" for ch in value)


def check_bits(value: str, length: int, what: str = "bit string") -> str:
    """Validate ``value`` as a bit string of exactly ``length`` bits"""
    if not isinstance(value, str) or not is_bitstring(value):
        raise LengthMismatchError(f"{what} must be a string of 0/1 characters, got {value!r}")
    if len(value) != length:
        raise LengthMismatchError(f"{what} has length {len(value)}, expected {length}")
    return value


def to_int(bits: str) -> int:
    return int(bits, 2) if bits else 0


def from_int(value: int, length: int) -> str:
    if length == 0:
        return ""
    return format(value, f"0{length}b")


def all_strings(length: int) -> Iterator[str]:
    """All bit strings of ``length`` bits in lexicographic order"""
    for value in range(1 << length):
        yield from_int(value, length)


def prefix_range(prefix: str, length: int) -> range:
    """Integers whose ``length``-bit encodings start with ``prefix``"""
    free = length - len(prefix)
    start = to_int(prefix) << free
    return range(start, start + (1 << free))


def flip(bits: str, index: int) -> str:
    return bits[:index] + ("1" if bits[index] == "0" else "0") + bits[index + 1:]
