"""Hash-family descriptors, evaluation, duality, and composition.

Five kinds of linear surjective families over GF(2):

* ``mt`` - modified Toeplitz, generator (T(r) | I_m), seed n-1 bits;
* ``f1`` - blockwise r_1 x_1 + ... + r_{l-1} x_{l-1} + x_l over F_{2^m},
  seed (l-1) m bits; universal and 1-almost dual universal;
* ``f2`` - (x_1 + r x_l, ..., x_{l-1} + r^{l-1} x_l) over F_{2^k} with
  k = n - m, seed k bits; ceil(m/(n-m))-almost dual universal;
* ``dual`` - the check-matrix family of any of the above;
* ``composed`` - outer o inner, seeds concatenated inner-first.

Field blocks use the circulant representation from :mod:`pahash.facm`,
so f1/f2 hashing costs l-1 cyclic convolutions: O(n log n) total.

Duality convention: for a generator written with its identity block
(G = (I_m | A) or (A | I_m)) the check matrix mirrors it exactly
(H = (A^T | I_{n-m}) resp. (I_{n-m} | A^T)), which makes G H^T = 0 hold
bit-for-bit.  Because transposing a circulant reverses its symbol, dual
evaluation is the same blockwise formula with each seed block acting
through the transposed field representation.

Construction and evaluation work for any block size (the blockwise
products are ring products in F_2[x]/(x^{k+1}+1), which is linear in
either operand regardless of k).  The universality guarantees, however,
hold only when the block size is a genuine circulant-field size
(:func:`pahash.facm.is_in_na`); :func:`proven_delta_claims` returns None
for anything this library cannot vouch for.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import ceil
from typing import Optional

import numpy as np

from .bitlinalg import (
    BitMatrix,
    BitVector,
    ToeplitzSpec,
    cyclic_convolve_f2,
    dense_mul,
    modified_toeplitz_hash,
    toeplitz_mul,
)
from .facm import is_in_na, find_na_at_least

__all__ = [
    "FamilySpec",
    "SeedLayout",
    "InfeasibleFamilyError",
    "make_mt",
    "make_f1",
    "make_f2",
    "make_g",
    "make_f3",
    "make_f4",
    "dual",
    "evaluate",
    "generator_matrix",
    "check_matrix",
    "nearest_feasible",
    "proven_delta_claims",
    "serialize_spec",
    "parse_spec",
    "MATRIX_SCALE_CAP",
]

MATRIX_SCALE_CAP = 32  # explicit matrices are for verification-scale n


class InfeasibleFamilyError(ValueError):
    """The requested parameters admit no family of this kind."""


@dataclass(frozen=True)
class SeedLayout:
    segments: tuple[tuple[str, int], ...]

    @property
    def total(self) -> int:
        return sum(bits for _, bits in self.segments)


@dataclass(frozen=True)
class FamilySpec:
    """Descriptor of one hash family; immutable and hashable."""

    kind: str
    n: int
    m: int
    d: int
    block_bits: Optional[int] = None
    blocks: Optional[int] = None
    base: Optional["FamilySpec"] = None
    inner: Optional["FamilySpec"] = None
    outer: Optional["FamilySpec"] = None
    requested_l: Optional[int] = None

    def seed_layout(self) -> SeedLayout:
        if self.kind == "mt":
            return SeedLayout((("toeplitz", self.n - 1),))
        if self.kind == "f1":
            return SeedLayout(
                tuple((f"r{i}", self.block_bits) for i in range(1, self.blocks))
            )
        if self.kind == "f2":
            return SeedLayout((("r", self.block_bits),))
        if self.kind == "dual":
            return self.base.seed_layout()
        if self.kind == "composed":
            inner = tuple(
                (f"inner.{lbl}", b) for lbl, b in self.inner.seed_layout().segments
            )
            outer = tuple(
                (f"outer.{lbl}", b) for lbl, b in self.outer.seed_layout().segments
            )
            return SeedLayout(inner + outer)
        raise ValueError(f"unknown kind {self.kind!r}")

    def __str__(self) -> str:
        return serialize_spec(self)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def make_mt(n: int, m: int) -> FamilySpec:
    if not (1 <= m < n):
        raise InfeasibleFamilyError(f"modified Toeplitz needs 1 <= m < n, got {n=} {m=}")
    return FamilySpec(kind="mt", n=n, m=m, d=n - 1)


def make_f1(m: int, l: int) -> FamilySpec:
    """Blockwise family over blocks of m bits, n = l*m, seed (l-1)*m bits.

    Constructible for any m >= 1 (block products are ring products in
    F_2[x]/(x^{m+1}+1)); the universality claims additionally require m
    to be a valid field size, see :func:`proven_delta_claims`.
    """
    if l < 2:
        raise InfeasibleFamilyError(f"f1 needs at least 2 blocks, got l={l}")
    if m < 1:
        raise InfeasibleFamilyError(f"f1 needs block size >= 1, got m={m}")
    return FamilySpec(kind="f1", n=l * m, m=m, d=(l - 1) * m, block_bits=m, blocks=l)


def make_f2(k: int, l: int) -> FamilySpec:
    """Power-seed family with block size k = n - m, seed k bits."""
    if l < 2:
        raise InfeasibleFamilyError(f"f2 needs at least 2 blocks, got l={l}")
    if k < 1:
        raise InfeasibleFamilyError(f"f2 needs block size >= 1, got k={k}")
    return FamilySpec(
        kind="f2", n=l * k, m=(l - 1) * k, d=k, block_bits=k, blocks=l
    )


def dual(spec: FamilySpec) -> FamilySpec:
    """Check-matrix family; applying it twice returns the original."""
    if spec.kind == "dual":
        return spec.base
    return FamilySpec(kind="dual", n=spec.n, m=spec.n - spec.m, d=spec.d, base=spec)


def _g_stage_feasible(n: int, l: int, m: int) -> bool:
    return m < l < n and n % (n - l) == 0 and l % (l - m) == 0


def make_g(n: int, l: int, m: int, requested_l: Optional[int] = None) -> FamilySpec:
    """Two-stage compression n -> l -> m built from two f2 families.

    The inner stage is the f2 family with block size n-l (an n -> l map
    with an (n-l)-bit seed); the outer is the f2 family with block size
    l-m (l -> m, seed l-m bits).  Total seed length is therefore n-m,
    the sum of the two segments; the universality claims multiply when
    both block sizes are valid field sizes.
    """
    if not (m < l < n):
        raise InfeasibleFamilyError(f"need m < l < n, got {m=} {l=} {n=}")
    if not _g_stage_feasible(n, l, m):
        raise InfeasibleFamilyError(
            f"no two-stage family at {n=} {l=} {m=}: need (n-l) | n and (l-m) | l"
        )
    inner = make_f2(n - l, n // (n - l))
    outer = make_f2(l - m, l // (l - m))
    assert inner.m == l and outer.n == l
    return FamilySpec(
        kind="composed",
        n=n,
        m=m,
        d=inner.d + outer.d,
        inner=inner,
        outer=outer,
        requested_l=requested_l if requested_l is not None else l,
    )


def _snap_l(n: int, m: int, target: int) -> Optional[int]:
    for l in range(min(target, n - 1), m, -1):
        if _g_stage_feasible(n, l, m):
            return l
    return None


def make_f3(n: int, m: int, t: int) -> FamilySpec:
    """g with intermediate width l = t (snapped down to feasibility)."""
    if not (m < t < n):
        raise InfeasibleFamilyError(f"f3 needs m < t < n, got {m=} {t=} {n=}")
    l = _snap_l(n, m, t)
    if l is None:
        raise InfeasibleFamilyError(f"no feasible intermediate width <= {t} at {n=} {m=}")
    return make_g(n, l, m, requested_l=t)


def make_f4(n: int, m: int, t: int) -> FamilySpec:
    """g with intermediate width l = (t+m)/2 (snapped down to feasibility)."""
    target = (t + m) // 2
    if not (m < target < n):
        raise InfeasibleFamilyError(
            f"f4 needs m < (t+m)/2 < n, got {m=} {t=} {n=}"
        )
    l = _snap_l(n, m, target)
    if l is None:
        raise InfeasibleFamilyError(
            f"no feasible intermediate width <= {target} at {n=} {m=}"
        )
    return make_g(n, l, m, requested_l=target)


def nearest_feasible(kind: str, n: int, m: int) -> tuple[FamilySpec, int]:
    """Closest feasible (n', m') with n' >= n for f1/f2; returns padding bits.

    Zero-padding the source to n' cannot lower its min-entropy, so the
    caller pads the input; output truncation is never performed.
    """
    if kind == "mt":
        return make_mt(n, m), 0
    if kind == "f1":
        mp = find_na_at_least(max(m, 2)).k
        l = max(2, ceil(n / mp))
        spec = make_f1(mp, l)
        return spec, spec.n - n
    if kind == "f2":
        kp = find_na_at_least(max(n - m, 2)).k
        l = max(2, ceil(n / kp))
        spec = make_f2(kp, l)
        return spec, spec.n - n
    raise ValueError(f"no feasibility helper for kind {kind!r}")


# ---------------------------------------------------------------------------
# Blockwise field products (short forms, numpy bit arrays)
# ---------------------------------------------------------------------------


def _ext(bits: np.ndarray) -> np.ndarray:
    out = np.empty(bits.size + 1, dtype=np.uint8)
    out[:-1] = bits
    out[-1] = bits.sum() & 1
    return out


def _rev_cyclic(bits: np.ndarray) -> np.ndarray:
    return np.roll(bits[::-1], 1)


def _conv(a: np.ndarray, b: np.ndarray, method: str) -> np.ndarray:
    return cyclic_convolve_f2(
        BitVector(np.ascontiguousarray(a), _trusted=True),
        BitVector(np.ascontiguousarray(b), _trusted=True),
        method=method,
    ).bits


def _mul_short(r_ext: np.ndarray, v_short: np.ndarray, method: str) -> np.ndarray:
    """Shortened form of r * v given r in extended form."""
    return _conv(r_ext, _ext(v_short), method)[:-1]


def _mul_t_short(r_ext: np.ndarray, v_short: np.ndarray, method: str) -> np.ndarray:
    """M(r)^T v on shortened forms: the transposed-representation product."""
    k = v_short.size
    padded = np.zeros(k + 1, dtype=np.uint8)
    padded[:k] = v_short
    w = _conv(_rev_cyclic(r_ext), padded, method)
    return w[:k] ^ w[k]


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def evaluate(
    spec: FamilySpec, seed: BitVector, x: BitVector, method: str = "auto"
) -> BitVector:
    """Apply the family member selected by ``seed`` to ``x``.

    Linear in x for every fixed seed; output has spec.m bits.
    """
    if len(seed) != spec.d:
        raise ValueError(f"seed must have {spec.d} bits, got {len(seed)}")
    if len(x) != spec.n:
        raise ValueError(f"input must have {spec.n} bits, got {len(x)}")
    out = _evaluate_bits(spec, seed.bits, x.bits, method)
    return BitVector(np.ascontiguousarray(out), _trusted=True)


def _blocks(bits: np.ndarray, size: int) -> list[np.ndarray]:
    return [bits[i : i + size] for i in range(0, bits.size, size)]


def _evaluate_bits(
    spec: FamilySpec, seed: np.ndarray, x: np.ndarray, method: str
) -> np.ndarray:
    if spec.kind == "mt":
        return modified_toeplitz_hash(
            BitVector(np.ascontiguousarray(seed), _trusted=True),
            BitVector(np.ascontiguousarray(x), _trusted=True),
            spec.m,
            method=method,
        ).bits

    if spec.kind == "f1":
        k = spec.block_bits
        xs = _blocks(x, k)
        rs = _blocks(seed, k)
        acc = xs[-1].copy()
        for r_short, xi in zip(rs, xs[:-1]):
            acc ^= _mul_short(_ext(r_short), xi, method)
        return acc

    if spec.kind == "f2":
        k, l = spec.block_bits, spec.blocks
        xs = _blocks(x, k)
        r_ext = _ext(seed)
        w = _ext(xs[-1])  # full form of x_l, multiplied by r each round
        out = np.empty((l - 1) * k, dtype=np.uint8)
        for i in range(l - 1):
            w = _conv(r_ext, w, method)  # w = r^{i+1} * x_l
            out[i * k : (i + 1) * k] = xs[i] ^ w[:k]
        return out

    if spec.kind == "composed":
        mid = _evaluate_bits(spec.inner, seed[: spec.inner.d], x, method)
        return _evaluate_bits(spec.outer, seed[spec.inner.d :], mid, method)

    if spec.kind == "dual":
        return _evaluate_dual_bits(spec.base, seed, x, method)

    raise ValueError(f"unknown kind {spec.kind!r}")


def _evaluate_dual_bits(
    base: FamilySpec, seed: np.ndarray, x: np.ndarray, method: str
) -> np.ndarray:
    if base.kind == "mt":
        n, m = base.n, base.m
        t_spec = ToeplitzSpec(
            m=n - m,
            n=n,
            seed=BitVector(np.ascontiguousarray(seed[::-1]), _trusted=True),
        )
        t_part = toeplitz_mul(
            t_spec, BitVector(np.ascontiguousarray(x[n - m :]), _trusted=True),
            method=method,
        )
        return x[: n - m] ^ t_part.bits

    if base.kind == "f1":
        k, l = base.block_bits, base.blocks
        xs = _blocks(x, k)
        rs = _blocks(seed, k)
        assert len(rs) == l - 1
        out = np.empty((l - 1) * k, dtype=np.uint8)
        for i, r_short in enumerate(rs):
            out[i * k : (i + 1) * k] = xs[i] ^ _mul_t_short(
                _ext(r_short), xs[-1], method
            )
        return out

    if base.kind == "f2":
        k, l = base.block_bits, base.blocks
        xs = _blocks(x, k)
        r_ext = _ext(seed)
        acc = xs[-1].copy()
        p = r_ext  # r^{i} in full form
        for i in range(l - 1):
            padded = np.zeros(k + 1, dtype=np.uint8)
            padded[:k] = xs[i]
            w = _conv(_rev_cyclic(p), padded, method)
            acc ^= w[:k] ^ w[k]
            if i + 1 < l - 1:
                p = _conv(p, r_ext, method)
        return acc

    if base.kind == "composed":
        h = generator_matrix(dual(base), BitVector(np.ascontiguousarray(seed), _trusted=True))
        return dense_mul(h, BitVector(np.ascontiguousarray(x), _trusted=True)).bits

    raise ValueError(f"no dual evaluation for base kind {base.kind!r}")


# ---------------------------------------------------------------------------
# Explicit matrices (verification scale)
# ---------------------------------------------------------------------------


def _m_short_dense(k: int, r_short: np.ndarray) -> BitMatrix:
    """k x k matrix of multiplication by r in the shortened basis."""
    r_ext = _ext(r_short)
    rolls = np.stack([np.roll(r_ext, j) for j in range(k + 1)])
    cols = (rolls[:k] ^ rolls[k])[:, :k]  # column j = (r * (x^j + x^k)) shortened
    return BitMatrix(np.ascontiguousarray(cols.T))


def _check_scale(spec: FamilySpec):
    if spec.n > MATRIX_SCALE_CAP:
        raise ValueError(
            f"explicit matrices are capped at n <= {MATRIX_SCALE_CAP}, got n={spec.n}"
        )


def generator_matrix(spec: FamilySpec, seed: BitVector) -> BitMatrix:
    """Explicit m x n generator G with evaluate(spec, seed, x) = G x.

    Built structurally (circulant blocks, Toeplitz entries, products),
    not by probing evaluate, so the two can be checked against each other.
    """
    _check_scale(spec)
    if len(seed) != spec.d:
        raise ValueError(f"seed must have {spec.d} bits, got {len(seed)}")
    s = seed.bits

    if spec.kind == "mt":
        t = ToeplitzSpec(m=spec.m, n=spec.n, seed=seed).dense()
        return t.hstack(BitMatrix.identity(spec.m))

    if spec.kind == "f1":
        k = spec.block_bits
        g = None
        for r_short in _blocks(s, k):
            blk = _m_short_dense(k, r_short)
            g = blk if g is None else g.hstack(blk)
        return g.hstack(BitMatrix.identity(spec.m))

    if spec.kind == "f2":
        k, l = spec.block_bits, spec.blocks
        stacked = None
        r_ext = _ext(s)
        p = r_ext
        for i in range(l - 1):
            blk = _m_short_dense(k, p[:-1])
            stacked = blk if stacked is None else stacked.vstack(blk)
            if i + 1 < l - 1:
                p = _conv(p, r_ext, "auto")
        return BitMatrix.identity(spec.m).hstack(stacked)

    if spec.kind == "composed":
        g_in = generator_matrix(spec.inner, seed[: spec.inner.d])
        g_out = generator_matrix(spec.outer, seed[spec.inner.d :])
        return g_out @ g_in

    if spec.kind == "dual":
        return _check_matrix_of(spec.base, seed)

    raise ValueError(f"unknown kind {spec.kind!r}")


def _check_matrix_of(base: FamilySpec, seed: BitVector) -> BitMatrix:
    s = seed.bits

    if base.kind == "mt":
        t = ToeplitzSpec(m=base.m, n=base.n, seed=seed).dense()
        return BitMatrix.identity(base.n - base.m).hstack(t.transpose())

    if base.kind == "f1":
        k = base.block_bits
        stacked = None
        for r_short in _blocks(s, k):
            blk = _m_short_dense(k, r_short).transpose()
            stacked = blk if stacked is None else stacked.vstack(blk)
        return BitMatrix.identity(base.n - base.m).hstack(stacked)

    if base.kind == "f2":
        k, l = base.block_bits, base.blocks
        h = None
        r_ext = _ext(s)
        p = r_ext
        for i in range(l - 1):
            blk = _m_short_dense(k, p[:-1]).transpose()
            h = blk if h is None else h.hstack(blk)
            if i + 1 < l - 1:
                p = _conv(p, r_ext, "auto")
        return h.hstack(BitMatrix.identity(k))

    if base.kind == "composed":
        g = generator_matrix(base, seed)
        return g.kernel_basis()

    raise ValueError(f"no check matrix for base kind {base.kind!r}")


def check_matrix(spec: FamilySpec, seed: BitVector) -> BitMatrix:
    """(n-m) x n matrix H with G H^T = 0 and rank n-m."""
    _check_scale(spec)
    return generator_matrix(dual(spec), seed)


# ---------------------------------------------------------------------------
# Proven universality parameters
# ---------------------------------------------------------------------------


def proven_delta_claims(spec: FamilySpec) -> dict:
    """The universality parameters this library claims for ``spec``.

    Returns {"universal": delta or None, "dual": delta or None,
    "route": str}.  A None entry means no claim (not that the family is
    bad); the verify module measures the actual values at desk scale.
    """
    if spec.kind == "mt":
        return {"universal": 1.0, "dual": 1.0, "route": "dual"}
    if spec.kind == "f1":
        if not is_in_na(spec.block_bits):
            return {"universal": None, "dual": None, "route": "dual"}
        return {"universal": 1.0, "dual": 1.0, "route": "dual"}
    if spec.kind == "f2":
        if not is_in_na(spec.block_bits):
            return {"universal": None, "dual": None, "route": "dual"}
        return {
            "universal": None,
            "dual": float(spec.blocks - 1),
            "route": "dual",
        }
    if spec.kind == "dual":
        base = proven_delta_claims(spec.base)
        return {
            "universal": base["dual"],
            "dual": base["universal"],
            "route": "universal",
        }
    if spec.kind == "composed":
        d_in = proven_delta_claims(spec.inner)["dual"]
        d_out = proven_delta_claims(spec.outer)["dual"]
        dual_delta = None if d_in is None or d_out is None else d_in * d_out
        return {"universal": None, "dual": dual_delta, "route": "dual-dual-concat"}
    raise ValueError(f"unknown kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# Text records
# ---------------------------------------------------------------------------


def serialize_spec(spec: FamilySpec) -> str:
    base = f"n={spec.n},m={spec.m},d={spec.d}"
    if spec.kind == "mt":
        return f"mt({base})"
    if spec.kind in ("f1", "f2"):
        return f"{spec.kind}({base},k={spec.block_bits},l={spec.blocks})"
    if spec.kind == "dual":
        return f"dual({base},base={serialize_spec(spec.base)})"
    if spec.kind == "composed":
        return (
            f"composed({base},requested_l={spec.requested_l},"
            f"inner={serialize_spec(spec.inner)},outer={serialize_spec(spec.outer)})"
        )
    raise ValueError(f"unknown kind {spec.kind!r}")


_TOKEN = re.compile(r"([a-z0-9_]+)\(")


def parse_spec(text: str) -> FamilySpec:
    spec, rest = _parse_spec_inner(text.strip())
    if rest:
        raise ValueError(f"trailing data in family record: {rest!r}")
    return spec


def _parse_spec_inner(text: str) -> tuple[FamilySpec, str]:
    m = _TOKEN.match(text)
    if not m:
        raise ValueError(f"bad family record: {text!r}")
    kind = m.group(1)
    rest = text[m.end() :]
    fields: dict = {}
    while True:
        if rest.startswith(")"):
            rest = rest[1:]
            break
        key, _, rest = rest.partition("=")
        key = key.lstrip(",")
        if _TOKEN.match(rest):
            sub, rest = _parse_spec_inner(rest)
            fields[key] = sub
        else:
            val = re.match(r"[^,)]*", rest).group(0)
            rest = rest[len(val) :]
            fields[key] = None if val == "None" else int(val)
    return _spec_from_fields(kind, fields), rest


def _spec_from_fields(kind: str, f: dict) -> FamilySpec:
    if kind == "mt":
        spec = make_mt(f["n"], f["m"])
    elif kind == "f1":
        spec = make_f1(f["k"], f["l"])
    elif kind == "f2":
        spec = make_f2(f["k"], f["l"])
    elif kind == "dual":
        spec = dual(f["base"])
    elif kind == "composed":
        spec = FamilySpec(
            kind="composed",
            n=f["n"],
            m=f["m"],
            d=f["inner"].d + f["outer"].d,
            inner=f["inner"],
            outer=f["outer"],
            requested_l=f.get("requested_l"),
        )
    else:
        raise ValueError(f"unknown kind {kind!r}")
    for key in ("n", "m", "d"):
        if key in f and getattr(spec, key) != f[key]:
            raise ValueError(f"inconsistent {key} in family record")
    return spec
