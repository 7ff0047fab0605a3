"""Bit vectors and matrices over GF(2), with exact cyclic convolution.

The convolution core multiplies binary polynomials modulo x^L - 1.  Two
independent code paths are provided:

* an FFT path (float64 real transforms) guarded against rounding: the
  linear convolution is computed over the integers, rounded, and the
  worst observed rounding distance must stay below ``GUARD_LIMIT`` or a
  :class:`ConvolutionExactnessError` is raised.  Never silently wrong.
* a quadratic schoolbook path (windowed shift-and-xor over big integers)
  that serves both as the small-size fast path and as an independent
  oracle for the FFT path.

Toeplitz-by-vector products are reduced to a single cyclic convolution
by circulant embedding, which is what makes hashing O(n log n).

Bit order convention: index 0 is the lowest polynomial coefficient and
maps to the least significant bit of byte 0 in the canonical
little-endian serialization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import gmpy2
import numpy as np

try:
    from scipy import fft as _fft
except ImportError:  # pragma: no cover - scipy is a declared dependency
    _fft = None

__all__ = [
    "BitVector",
    "BitMatrix",
    "ToeplitzSpec",
    "ConvolutionExactnessError",
    "cyclic_convolve_f2",
    "cyclic_convolve_f2_schoolbook",
    "toeplitz_mul",
    "modified_toeplitz_hash",
    "dense_mul",
    "concat",
    "SCHOOLBOOK_CUTOFF",
    "GUARD_LIMIT",
    "MAX_FFT_LEN",
]

# Below this length the schoolbook path beats the FFT constant overhead.
SCHOOLBOOK_CUTOFF = 64

# Hard error threshold on the FFT rounding distance max |y - round(y)|.
GUARD_LIMIT = 0.25

# Structural cap for the float64 path.  Convolution counts are bounded by
# L, so coefficients stay far inside the 53-bit mantissa; the observed
# rounding distance at 2**26 is ~1e-8, orders of magnitude under the guard.
MAX_FFT_LEN = 1 << 26


class ConvolutionExactnessError(RuntimeError):
    """The transform size exceeds the bit-exactness guarantee."""


class BitVector:
    """Immutable vector over GF(2), stored one byte per bit."""

    __slots__ = ("bits",)

    def __init__(self, bits, _trusted: bool = False):
        if _trusted:
            arr = bits
        else:
            arr = np.ascontiguousarray(bits, dtype=np.uint8)
            if arr.ndim != 1:
                raise ValueError("BitVector requires a 1-d bit sequence")
            if arr.size and arr.max() > 1:
                raise ValueError("BitVector entries must be 0 or 1")
            arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    def __setattr__(self, name, value):
        raise AttributeError("BitVector is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(np.zeros(n, dtype=np.uint8), _trusted=True)

    @classmethod
    def ones(cls, n: int) -> "BitVector":
        return cls(np.ones(n, dtype=np.uint8), _trusted=True)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        return cls(np.fromiter(bits, dtype=np.uint8))

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitVector":
        """Little-endian: bit i of ``value`` becomes index i."""
        if value < 0 or (n < value.bit_length()):
            raise ValueError("value does not fit in n bits")
        data = value.to_bytes((n + 7) // 8 or 1, "little")
        return cls.from_bytes(data, n)

    @classmethod
    def from_bytes(cls, data: bytes, n: int) -> "BitVector":
        """Canonical deserialization: LSB-first within little-endian bytes."""
        if len(data) * 8 < n:
            raise ValueError(f"need {n} bits, got {len(data) * 8}")
        raw = np.frombuffer(bytes(data), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")[:n]
        return cls(np.ascontiguousarray(bits), _trusted=True)

    @classmethod
    def random(cls, n: int, rng) -> "BitVector":
        """Deterministic given ``rng`` (an int seed or a numpy Generator)."""
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        return cls(rng.integers(0, 2, n, dtype=np.uint8), _trusted=True)

    # -- queries ------------------------------------------------------

    def __len__(self) -> int:
        return int(self.bits.size)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return BitVector(np.ascontiguousarray(self.bits[idx]), _trusted=True)
        return int(self.bits[idx])

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(
            np.array_equal(self.bits, other.bits)
        )

    def __hash__(self):
        return hash((len(self), self.to_bytes()))

    def __xor__(self, other: "BitVector") -> "BitVector":
        if len(self) != len(other):
            raise ValueError("length mismatch in xor")
        return BitVector(np.bitwise_xor(self.bits, other.bits), _trusted=True)

    def weight(self) -> int:
        return int(self.bits.sum())

    def to_bytes(self) -> bytes:
        """Canonical serialization; the bit length travels out-of-band."""
        if len(self) == 0:
            return b""
        return np.packbits(self.bits, bitorder="little").tobytes()

    def to_int(self) -> int:
        return int.from_bytes(self.to_bytes(), "little") if len(self) else 0

    def to01(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def __repr__(self) -> str:
        if len(self) <= 32:
            return f"BitVector({self.to01()!r})"
        return f"BitVector(len={len(self)}, weight={self.weight()})"


def concat(*vectors: BitVector) -> BitVector:
    if not vectors:
        return BitVector.zeros(0)
    return BitVector(
        np.concatenate([v.bits for v in vectors]).astype(np.uint8), _trusted=True
    )


@dataclass(frozen=True)
class ToeplitzSpec:
    """m x (n-m) Toeplitz matrix T with T[i, j] = seed[(j - i) + m - 1].

    The seed packs the n-1 defining entries bottom-left to top-right:
    seed[0] is the bottom-left corner, seed[m-1] the whole diagonal,
    seed[n-2] the top-right corner.
    """

    m: int
    n: int
    seed: BitVector

    def __post_init__(self):
        if not (1 <= self.m < self.n):
            raise ValueError(f"need 1 <= m < n, got m={self.m} n={self.n}")
        if len(self.seed) != self.n - 1:
            raise ValueError(
                f"seed must have n-1={self.n - 1} bits, got {len(self.seed)}"
            )

    def dense(self) -> "BitMatrix":
        m, width = self.m, self.n - self.m
        s = self.seed.bits
        rows = np.empty((m, width), dtype=np.uint8)
        for i in range(m):
            rows[i] = s[m - 1 - i : m - 1 - i + width]
        return BitMatrix(rows)


class BitMatrix:
    """Dense matrix over GF(2); intended for verification-scale sizes."""

    __slots__ = ("entries",)

    MAX_ENTRIES = 1 << 24

    def __init__(self, entries, _trusted: bool = False):
        if _trusted:
            arr = entries
        else:
            arr = np.ascontiguousarray(entries, dtype=np.uint8)
            if arr.ndim != 2:
                raise ValueError("BitMatrix requires a 2-d array")
            if arr.size and arr.max() > 1:
                raise ValueError("BitMatrix entries must be 0 or 1")
            if arr.size > self.MAX_ENTRIES:
                raise ValueError("matrix exceeds verification-scale cap")
            arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def __setattr__(self, name, value):
        raise AttributeError("BitMatrix is immutable")

    @property
    def rows(self) -> int:
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        return int(self.entries.shape[1])

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(np.eye(n, dtype=np.uint8), _trusted=True)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8), _trusted=True)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        return cls(np.asarray(rows, dtype=np.uint8))

    @classmethod
    def random(cls, rows: int, cols: int, rng) -> "BitMatrix":
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        return cls(rng.integers(0, 2, (rows, cols), dtype=np.uint8), _trusted=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(
            np.array_equal(self.entries, other.entries)
        )

    def __hash__(self):
        return hash((self.entries.shape, self.entries.tobytes()))

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ValueError("matrix dimension mismatch")
        prod = (self.entries.astype(np.uint64) @ other.entries.astype(np.uint64)) & 1
        return BitMatrix(prod.astype(np.uint8), _trusted=True)

    def transpose(self) -> "BitMatrix":
        return BitMatrix(np.ascontiguousarray(self.entries.T), _trusted=True)

    def hstack(self, other: "BitMatrix") -> "BitMatrix":
        return BitMatrix(np.hstack([self.entries, other.entries]), _trusted=True)

    def vstack(self, other: "BitMatrix") -> "BitMatrix":
        return BitMatrix(np.vstack([self.entries, other.entries]), _trusted=True)

    def is_zero(self) -> bool:
        return not self.entries.any()

    def row(self, i: int) -> BitVector:
        return BitVector(np.ascontiguousarray(self.entries[i]), _trusted=True)

    def _rref(self):
        work = self.entries.astype(np.uint8).copy()
        pivots = []
        r = 0
        for c in range(work.shape[1]):
            if r == work.shape[0]:
                break
            hits = np.flatnonzero(work[r:, c]) + r
            if hits.size == 0:
                continue
            p = int(hits[0])
            if p != r:
                work[[r, p]] = work[[p, r]]
            others = np.flatnonzero(work[:, c])
            others = others[others != r]
            work[others] ^= work[r]
            pivots.append(c)
            r += 1
        return work, pivots

    def rank(self) -> int:
        return len(self._rref()[1])

    def kernel_basis(self) -> "BitMatrix":
        """Canonical (RREF-derived) basis of {x : Mx = 0}, one row per vector."""
        work, pivots = self._rref()
        n = self.cols
        free = [c for c in range(n) if c not in pivots]
        basis = np.zeros((len(free), n), dtype=np.uint8)
        for bi, fc in enumerate(free):
            basis[bi, fc] = 1
            for ri, pc in enumerate(pivots):
                basis[bi, pc] = work[ri, fc]
        return BitMatrix(basis, _trusted=True)

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def dense_mul(matrix: BitMatrix, x: BitVector) -> BitVector:
    """y_i = XOR_j M[i, j] x_j.  The brute-force oracle for every fast path."""
    if matrix.cols != len(x):
        raise ValueError(f"matrix has {matrix.cols} cols, vector has {len(x)} bits")
    acc = matrix.entries.astype(np.uint64) @ x.bits.astype(np.uint64)
    return BitVector((acc & 1).astype(np.uint8), _trusted=True)


# ---------------------------------------------------------------------------
# Cyclic convolution over GF(2)
# ---------------------------------------------------------------------------


def _next_fast_len(n: int) -> int:
    if _fft is not None:
        return int(_fft.next_fast_len(n, real=True))
    size = 1
    while size < n:
        size <<= 1
    return size


def _fold_mod2(lin: np.ndarray, length: int) -> np.ndarray:
    """Reduce an exact linear convolution (length 2L-1) modulo x^L - 1."""
    out = lin[:length].copy()
    tail = lin[length:]
    out[: tail.size] += tail
    return (out & 1).astype(np.uint8)


def _linear_convolve_fft_exact(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    length = a.size
    if length > MAX_FFT_LEN:
        raise ConvolutionExactnessError(
            f"length {length} exceeds the float-FFT exactness cap {MAX_FFT_LEN}"
        )
    size = _next_fast_len(2 * length - 1)
    fa = np.fft.rfft(a.astype(np.float64), size)
    fb = np.fft.rfft(b.astype(np.float64), size)
    y = np.fft.irfft(fa * fb, size)[: 2 * length - 1]
    r = np.rint(y)
    guard = float(np.max(np.abs(y - r))) if y.size else 0.0
    if guard >= GUARD_LIMIT:
        raise ConvolutionExactnessError(
            f"FFT rounding distance {guard:.3g} >= {GUARD_LIMIT}; result rejected"
        )
    return r.astype(np.int64)


def _bits_to_mpz(bits: np.ndarray) -> "gmpy2.mpz":
    packed = np.packbits(bits, bitorder="little").tobytes()
    return gmpy2.mpz(int.from_bytes(packed, "little"))


def _mpz_to_bits(value, n: int) -> np.ndarray:
    nbytes = (n + 7) // 8 or 1
    data = int(value).to_bytes(nbytes, "little")
    raw = np.frombuffer(data, dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].copy()


_COMB_WINDOW = 8


def _poly_mul_int(a_bits: np.ndarray, b_bits: np.ndarray):
    """Schoolbook GF(2) polynomial product as a big integer.

    Classic quadratic comb: the multiplier is scanned in 8-bit windows
    and the 256 window multiples of b are shift-xored in.  No transforms
    anywhere, so this is a fully independent check on the FFT path.
    """
    a = _bits_to_mpz(a_bits)
    b = _bits_to_mpz(b_bits)
    if not a or not b:
        return gmpy2.mpz(0)
    if a_bits.size <= 256:
        acc = gmpy2.mpz(0)
        for i in np.flatnonzero(a_bits):
            acc ^= b << int(i)
        return acc
    table = [gmpy2.mpz(0)] * (1 << _COMB_WINDOW)
    for w in range(1, 1 << _COMB_WINDOW):
        low = w & -w
        table[w] = table[w ^ low] ^ (b << (low.bit_length() - 1))
    acc = gmpy2.mpz(0)
    shift = 0
    mask = (1 << _COMB_WINDOW) - 1
    while a:
        w = int(a & mask)
        if w:
            acc ^= table[w] << shift
        a >>= _COMB_WINDOW
        shift += _COMB_WINDOW
    return acc


def _check_conv_args(a: BitVector, b: BitVector) -> int:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if len(a) < 1:
        raise ValueError("convolution needs length >= 1")
    return len(a)


def cyclic_convolve_f2_schoolbook(a: BitVector, b: BitVector) -> BitVector:
    """Quadratic-time cyclic convolution; oracle and small-size fast path."""
    length = _check_conv_args(a, b)
    prod = _poly_mul_int(a.bits, b.bits)
    lin = _mpz_to_bits(prod, 2 * length - 1).astype(np.int64)
    return BitVector(_fold_mod2(lin, length), _trusted=True)


def cyclic_convolve_f2(a: BitVector, b: BitVector, method: str = "auto") -> BitVector:
    """c_t = XOR over i+j = t (mod L) of a_i b_j.

    ``method`` selects "fft", "schoolbook", or "auto" (schoolbook below
    SCHOOLBOOK_CUTOFF).  Both paths are bit-exact; the FFT path raises
    :class:`ConvolutionExactnessError` rather than ever rounding silently.
    """
    length = _check_conv_args(a, b)
    if method == "auto":
        method = "schoolbook" if length < SCHOOLBOOK_CUTOFF else "fft"
    if method == "schoolbook":
        return cyclic_convolve_f2_schoolbook(a, b)
    if method != "fft":
        raise ValueError(f"unknown method {method!r}")
    lin = _linear_convolve_fft_exact(a.bits, b.bits)
    return BitVector(_fold_mod2(lin, length), _trusted=True)


def _reverse_cyclic(bits: np.ndarray) -> np.ndarray:
    # index map t -> -t mod L, i.e. v'[0] = v[0], v'[t] = v[L - t]
    return np.roll(bits[::-1], 1)


def _circulant_mul(first_row: np.ndarray, z: np.ndarray, method: str) -> np.ndarray:
    # C[i, j] = first_row[(j - i) mod L], so C z is the cross-correlation
    # of first_row with z == cyclic convolution after index reversal.
    v = BitVector(np.ascontiguousarray(_reverse_cyclic(first_row)), _trusted=True)
    zv = BitVector(np.ascontiguousarray(z), _trusted=True)
    return cyclic_convolve_f2(v, zv, method=method).bits


def toeplitz_mul(spec: ToeplitzSpec, x: BitVector, method: str = "auto") -> BitVector:
    """T(seed) @ x via circulant embedding of the (n-1)-cyclic extension."""
    m, n = spec.m, spec.n
    width = n - m
    if len(x) != width:
        raise ValueError(f"input must have n-m={width} bits, got {len(x)}")
    s = spec.seed.bits
    # circulant first row: T's first row followed by its first column
    # walked bottom-up, giving all n-1 defining entries once.
    first_row = np.concatenate([s[m - 1 :], s[: m - 1]])
    z = np.zeros(n - 1, dtype=np.uint8)
    z[:width] = x.bits
    full = _circulant_mul(first_row, z, method)
    return BitVector(np.ascontiguousarray(full[:m]), _trusted=True)


def modified_toeplitz_hash(
    seed: BitVector, x: BitVector, m: int, method: str = "auto"
) -> BitVector:
    """Hash with generator (T(seed) | I_m): T acts on the first n-m bits,
    the last m bits are xored in."""
    n = len(x)
    if not (1 <= m < n):
        raise ValueError(f"need 1 <= m < n, got m={m} n={n}")
    if len(seed) != n - 1:
        raise ValueError(f"seed must have n-1={n - 1} bits, got {len(seed)}")
    spec = ToeplitzSpec(m=m, n=n, seed=seed)
    t_part = toeplitz_mul(spec, x[: n - m], method=method)
    return t_part ^ x[n - m :]
