"""Exact polynomial arithmetic on big-integer coefficients.

Univariate polynomials are lists of nonnegative Python ints (index = power).
Products use Kronecker substitution: both operands are packed into a single
integer with a slot width large enough that no carries cross slots, so one
big-integer multiplication does the whole convolution.
"""

from __future__ import annotations

from typing import Sequence


def _slot_bits(a: Sequence[int], b: Sequence[int]) -> int:
    ma = max(a).bit_length()
    mb = max(b).bit_length()
    return ma + mb + min(len(a), len(b)).bit_length() + 1


def _pack(coeffs: Sequence[int], bits: int) -> int:
    width = (bits + 3) // 4
    return int("".join(format(c, f"0{width}x") for c in reversed(coeffs)) or "0", 16)


def _unpack(value: int, bits: int, length: int) -> list[int]:
    width = (bits + 3) // 4
    digits = format(value, "x").rjust(width * length, "0")
    return [int(digits[i - width : i], 16) for i in range(len(digits), 0, -width)][:length]


def trim(a: Sequence[int]) -> list[int]:
    out = list(a)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if any(c < 0 for c in a) or any(c < 0 for c in b):
        raise ValueError("Kronecker packing needs nonnegative coefficients")
    if not any(a) or not any(b):
        return [0]
    bits = _slot_bits(a, b)
    # round the slot up to whole hex digits so pack/unpack agree
    bits = 4 * ((bits + 3) // 4)
    prod = _pack(a, bits) * _pack(b, bits)
    return trim(_unpack(prod, bits, len(a) + len(b) - 1))


def power(a: Sequence[int], n: int) -> list[int]:
    if n < 0:
        raise ValueError("negative exponent")
    result = [1]
    base = trim(a)
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def mul_naive(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Schoolbook product, kept as an independent cross-check."""
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def flatten2d(coeffs: Sequence[Sequence[int]], stride: int) -> list[int]:
    """Map B[i][j] to slot i * stride + j; stride must exceed every final j-degree."""
    out = [0] * ((len(coeffs) - 1) * stride + len(coeffs[0]))
    for i, row in enumerate(coeffs):
        for j, c in enumerate(row):
            out[i * stride + j] += c
    return out


def coeff2d(flat: Sequence[int], stride: int, i: int, j: int) -> int:
    idx = i * stride + j
    return flat[idx] if 0 <= j < stride and 0 <= idx < len(flat) else 0


__all__ = ["coeff2d", "flatten2d", "mul", "mul_naive", "power", "trim"]
