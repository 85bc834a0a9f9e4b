"""Deterministic numeric substrate shared by every model in the package.

Dense linear algebra is delegated to numpy (float64 throughout); what this
module owns is the part that has to be bit-reproducible across platforms and
languages: the seeded PRNG, the shuffling primitives built on it, and the
finite-difference gradient oracle used to verify every hand-written backward
pass in the repo.

PRNG algorithm (xorshift64*)
----------------------------
State is a single 64-bit word. Seeding: the user seed is scrambled once with
the splitmix64 finalizer

    z  = (seed + 0x9E3779B97F4A7C15) mod 2^64
    z ^= z >> 30;  z = z * 0xBF58476D1CE4E5B9 mod 2^64
    z ^= z >> 27;  z = z * 0x94D049BB133111EB mod 2^64
    z ^= z >> 31

and a resulting state of 0 is replaced by 0x9E3779B97F4A7C15. Each step is

    s ^= s >> 12;  s ^= s << 25 (mod 2^64);  s ^= s >> 27
    output = s * 0x2545F4914F6CDD1D mod 2^64

Doubles in [0, 1) take the top 53 bits: (output >> 11) * 2^-53. Bounded
integers use rejection sampling on ``output mod n``. Conformance vectors
(seed -> first 16 outputs) ship in ``careerkit/data/rng_vectors.txt``.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

__all__ = [
    "OracleError",
    "SeededRng",
    "argmax_tiebreak",
    "finite_difference_gradient",
    "matmul",
    "relu",
    "sigmoid",
    "softmax",
]

_MASK64 = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_TWO_NEG_53 = 2.0 ** -53


class OracleError(ValueError):
    """The finite-difference oracle hit a non-finite function value."""


def _mix64(z: int) -> int:
    z = (z + _SPLITMIX_GAMMA) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


class SeededRng:
    """xorshift64* generator; same seed gives the same stream on any platform.

    Single-owner: not safe to share across threads.
    """

    algorithm = "xorshift64*"

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        state = _mix64(int(seed) & _MASK64)
        self._state = state if state != 0 else _SPLITMIX_GAMMA

    def next_uint64(self) -> int:
        s = self._state
        s ^= s >> 12
        s = (s ^ (s << 25)) & _MASK64
        s ^= s >> 27
        self._state = s
        return (s * 0x2545F4914F6CDD1D) & _MASK64

    def random(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_uint64() >> 11) * _TWO_NEG_53

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        limit = _MASK64 + 1 - ((_MASK64 + 1) % n)
        while True:
            u = self.next_uint64()
            if u < limit:
                return u % n

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates permutation of 0..n-1 drawn from this stream."""
        items = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def random_array(self, shape: int | tuple[int, ...], low: float = 0.0,
                     high: float = 1.0) -> np.ndarray:
        """Array of uniforms drawn row-major from this stream."""
        n = int(np.prod(shape))
        out = np.fromiter((self.random() for _ in range(n)),
                          dtype=np.float64, count=n)
        if high != 1.0 or low != 0.0:
            out = low + (high - low) * out
        return out.reshape(shape)


def softmax(v: Sequence[float] | np.ndarray) -> np.ndarray:
    """Probability vector via exp-normalization with max subtraction."""
    v = np.asarray(v, dtype=np.float64)
    if v.size == 0:
        raise ValueError("softmax of an empty vector")
    shifted = v - np.max(v)
    e = np.exp(shifted)
    return e / e.sum()


def softmax_rows(m: np.ndarray) -> np.ndarray:
    """Row-wise softmax for batched logits."""
    shifted = m - m.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def relu(x):
    return np.maximum(0.0, x)


def sigmoid(x):
    # Split on sign so exp never overflows.
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    if out.ndim == 0:
        return float(out)
    return out


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError(f"matmul expects 2-D operands, got {a.shape} x {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul shape mismatch: {a.shape} x {b.shape}")
    return a @ b


def argmax_tiebreak(v: Sequence[float] | np.ndarray) -> int:
    """Smallest index achieving the maximum."""
    v = np.asarray(v)
    if v.size == 0:
        raise ValueError("argmax of an empty vector")
    return int(np.argmax(v))


def finite_difference_gradient(f: Callable[[np.ndarray], float],
                               x: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar function, one coordinate at a time."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        fp = f(x)
        flat[i] = orig - eps
        fm = f(x)
        flat[i] = orig
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise OracleError(f"non-finite value near coordinate {i}")
        gflat[i] = (fp - fm) / (2.0 * eps)
    return grad
