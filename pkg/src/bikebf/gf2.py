"""GF(2) arithmetic for quasi-cyclic codes with two circulant blocks.

Dense vectors are packed into Python integers (bit ``i`` of the integer is
coordinate ``i``), so XOR and weight are native big-int operations.  Sparse
objects (the private key) keep sorted index tuples.

Matrix convention: ``H = [H0 | H1]`` where row ``i`` of ``H0`` is ``h0``
cyclically shifted right by ``i``, i.e. ``H0[i][j] = 1`` iff
``(j - i) mod r`` is in the support of ``h0``.  ``H1`` occupies columns
``r .. 2r-1`` with the same rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

KEYGEN_MAX_RETRIES = 1000


class KeygenError(RuntimeError):
    """No invertible ``h0`` was found within the retry budget."""


@dataclass(frozen=True)
class BitVector:
    """Immutable dense GF(2) vector of fixed length."""

    length: int
    bits: int = 0

    def __post_init__(self) -> None:
        if self.length <= 0:
            raise ValueError(f"length must be positive, got {self.length}")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits outside the vector length")

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(length, 0)

    @classmethod
    def ones(cls, length: int) -> BitVector:
        return cls(length, (1 << length) - 1)

    @classmethod
    def unit(cls, length: int, j: int) -> BitVector:
        if not 0 <= j < length:
            raise IndexError(f"position {j} out of range [0, {length})")
        return cls(length, 1 << j)

    @classmethod
    def from_indices(cls, length: int, indices: Iterable[int]) -> BitVector:
        bits = 0
        for i in indices:
            if not 0 <= i < length:
                raise IndexError(f"index {i} out of range [0, {length})")
            bits |= 1 << i
        return cls(length, bits)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> BitVector:
        arr = np.asarray(arr, dtype=np.uint8)
        packed = np.packbits(arr, bitorder="little")
        return cls(int(arr.size), int.from_bytes(packed.tobytes(), "little"))

    def to_array(self) -> np.ndarray:
        """Unpack into a ``uint8`` array of 0/1 values."""
        nbytes = (self.length + 7) // 8
        raw = np.frombuffer(self.bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.length].copy()

    def indices(self) -> list[int]:
        out = []
        x = self.bits
        while x:
            low = x & -x
            out.append(low.bit_length() - 1)
            x ^= low
        return out

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __xor__(self, other: BitVector) -> BitVector:
        if other.length != self.length:
            raise ValueError(f"length mismatch: {self.length} vs {other.length}")
        return BitVector(self.length, self.bits ^ other.bits)

    def __bool__(self) -> bool:
        return self.bits != 0

    def split(self, r: int) -> tuple[BitVector, BitVector]:
        """Split a length-2r vector into its two halves."""
        if self.length != 2 * r:
            raise ValueError(f"expected length {2 * r}, got {self.length}")
        return BitVector(r, self.bits & ((1 << r) - 1)), BitVector(r, self.bits >> r)


@dataclass(frozen=True)
class SparseKey:
    """Private key ``(h0, h1)`` as sorted support tuples of equal weight."""

    r: int
    h0_support: tuple[int, ...]
    h1_support: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.r <= 0:
            raise ValueError("r must be positive")
        for name in ("h0_support", "h1_support"):
            sup = tuple(sorted(int(i) for i in getattr(self, name)))
            if len(set(sup)) != len(sup):
                raise ValueError(f"{name} has repeated indices")
            if sup and not (0 <= sup[0] and sup[-1] < self.r):
                raise ValueError(f"{name} has indices outside [0, {self.r})")
            object.__setattr__(self, name, sup)
        if len(self.h0_support) != len(self.h1_support):
            raise ValueError("h0 and h1 must have the same weight")
        if not self.h0_support:
            raise ValueError("key supports must be nonempty")

    @property
    def d(self) -> int:
        return len(self.h0_support)

    @property
    def w(self) -> int:
        return 2 * self.d

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Supports as ``int64`` arrays, the layout the decoder kernels take."""
        return (
            np.asarray(self.h0_support, dtype=np.int64),
            np.asarray(self.h1_support, dtype=np.int64),
        )

    def dense(self) -> np.ndarray:
        """Materialize ``H`` as an ``r x 2r`` uint8 matrix."""
        H = np.zeros((self.r, 2 * self.r), dtype=np.uint8)
        for block, sup in enumerate((self.h0_support, self.h1_support)):
            for i in range(self.r):
                for k in sup:
                    H[i, block * self.r + (i + k) % self.r] = 1
        return H


@dataclass(frozen=True)
class CodeParams:
    """Code and decoder parameters: block size, weights and schedule constants."""

    r: int
    w: int
    t: int
    lam: int = 128
    delta: int = 3
    i_max: int = 7

    def __post_init__(self) -> None:
        if min(self.r, self.w, self.lam, self.i_max) <= 0:
            raise ValueError("r, w, lambda and I_max must be positive")
        if self.w % 2:
            raise ValueError(f"w must be even, got {self.w}")
        if self.w // 2 >= self.r:
            raise ValueError("column weight d = w/2 must be below r")
        if not 0 <= self.t <= 2 * self.r:
            raise ValueError(f"t must lie in [0, 2r], got {self.t}")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")

    @property
    def d(self) -> int:
        return self.w // 2


# -- polynomial helpers (bit i <-> x^i) ------------------------------------


def poly_mod(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def poly_mulmod(a: int, b: int, r: int) -> int:
    """Product of two polynomials modulo ``x^r - 1``."""
    mask = (1 << r) - 1
    out = 0
    shift = 0
    while b:
        if b & 1:
            out ^= rotate(a, shift, r)
        b >>= 1
        shift += 1
    return out & mask


def rotate(x: int, k: int, r: int) -> int:
    """Cyclic left rotation of an ``r``-bit value, i.e. multiplication by x^k."""
    k %= r
    if k == 0:
        return x
    mask = (1 << r) - 1
    return ((x << k) | (x >> (r - k))) & mask


def is_invertible(support: Iterable[int], r: int) -> bool:
    """True iff ``h(x)`` is a unit modulo ``x^r - 1`` over GF(2)."""
    h = 0
    for i in support:
        if not 0 <= i < r:
            raise ValueError(f"index {i} out of range [0, {r})")
        h |= 1 << i
    if h == 0:
        raise ValueError("support must be nonempty")
    return poly_gcd((1 << r) | 1, h) == 1


# -- sampling ---------------------------------------------------------------


def sample_distinct(n: int, k: int, rng: np.random.Generator) -> list[int]:
    """``k`` distinct uniform indices from ``[0, n)`` by rejection of repeats."""
    if not 0 <= k <= n:
        raise ValueError(f"cannot draw {k} distinct values from {n}")
    seen: set[int] = set()
    out: list[int] = []
    while len(out) < k:
        for v in rng.integers(0, n, size=k - len(out)).tolist():
            if v not in seen:
                seen.add(v)
                out.append(v)
                if len(out) == k:
                    break
    return sorted(out)


def keygen_with_retries(
    r: int, d: int, rng: np.random.Generator, max_retries: int = KEYGEN_MAX_RETRIES
) -> tuple[SparseKey, int]:
    """Sample a key and report how many ``h0`` candidates were rejected."""
    if not 0 < d < r:
        raise ValueError(f"need 0 < d < r, got d={d}, r={r}")
    for rejected in range(max_retries + 1):
        h0 = sample_distinct(r, d, rng)
        if is_invertible(h0, r):
            h1 = sample_distinct(r, d, rng)
            return SparseKey(r, tuple(h0), tuple(h1)), rejected
    raise KeygenError(f"no invertible h0 after {max_retries} resamples (r={r}, d={d})")


def keygen(r: int, d: int, rng: np.random.Generator) -> SparseKey:
    return keygen_with_retries(r, d, rng)[0]


def sample_error(r: int, t: int, rng: np.random.Generator) -> BitVector:
    """Uniform weight-``t`` vector of length ``2r``."""
    return BitVector.from_indices(2 * r, sample_distinct(2 * r, t, rng))


# -- syndrome and columns -----------------------------------------------------


def _column_poly(support: Sequence[int], r: int) -> int:
    # column 0 of a circulant block: rows (-k) mod r for k in the support
    col = 0
    for k in support:
        col |= 1 << ((-k) % r)
    return col


def column(key: SparseKey, j: int) -> BitVector:
    """Column ``j`` of ``H`` as a length-``r`` vector."""
    r = key.r
    if not 0 <= j < 2 * r:
        raise IndexError(f"column {j} out of range [0, {2 * r})")
    sup = key.h0_support if j < r else key.h1_support
    return BitVector(r, rotate(_column_poly(sup, r), j % r, r))


def column_rows(key: SparseKey, j: int) -> list[int]:
    r = key.r
    if not 0 <= j < 2 * r:
        raise IndexError(f"column {j} out of range [0, {2 * r})")
    sup = key.h0_support if j < r else key.h1_support
    c = j % r
    return sorted((c - k) % r for k in sup)


def syndrome(key: SparseKey, e: BitVector) -> BitVector:
    """``s = H e^T``: XOR of the columns selected by ``e``."""
    r = key.r
    if e.length != 2 * r:
        raise ValueError(f"error vector length {e.length} != 2r = {2 * r}")
    base = (_column_poly(key.h0_support, r), _column_poly(key.h1_support, r))
    s = 0
    for j in e.indices():
        s ^= rotate(base[j >= r], j % r, r)
    return BitVector(r, s)


# -- text fixtures --------------------------------------------------------------


def format_indices(name: str, indices: Iterable[int]) -> str:
    return f"{name}: " + ",".join(str(i) for i in indices)


def parse_fixture(text: str) -> dict[str, list[int]]:
    """Parse ``name: i1,i2,...`` lines; blank lines and ``#`` comments are skipped."""
    out: dict[str, list[int]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, rest = line.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'name: values'")
        name = name.strip()
        if name in out:
            raise ValueError(f"line {lineno}: duplicate entry {name!r}")
        rest = rest.strip()
        try:
            out[name] = [int(v) for v in rest.split(",")] if rest else []
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer value in {name!r}") from None
    return out


def dump_key(key: SparseKey) -> str:
    return "\n".join(
        [
            format_indices("r", [key.r]),
            format_indices("h0", key.h0_support),
            format_indices("h1", key.h1_support),
        ]
    ) + "\n"


def load_key(text: str) -> SparseKey:
    fields = parse_fixture(text)
    try:
        (r,) = fields["r"]
        return SparseKey(r, tuple(fields["h0"]), tuple(fields["h1"]))
    except KeyError as exc:
        raise ValueError(f"key fixture missing {exc.args[0]!r}") from None
    except ValueError as exc:
        raise ValueError(f"invalid key fixture: {exc}") from None
