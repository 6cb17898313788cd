"""Activation functions, a small dense affine map, and a portable seeded RNG.

Everything here is 64-bit float; the RNG is integer arithmetic only, so the
same seed produces the same stream on every platform and Python build.
"""

import math

import numpy as np

_MASK64 = (1 << 64) - 1


def sigmoid(x):
    """Logistic function 1 / (1 + exp(-x)).

    Branches on sign so the exp() argument is never positive: sigmoid(-500)
    returns a tiny positive number instead of underflowing to 0 through
    1 / (1 + exp(500)).
    """
    arr = np.asarray(x, dtype=float)
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-arr[pos]))
    ex = np.exp(arr[~pos])
    out[~pos] = ex / (1.0 + ex)
    return float(out) if arr.ndim == 0 else out


def tanh_act(x):
    """Hyperbolic tangent; odd, bounded in (-1, 1), saturates without overflow."""
    out = np.tanh(np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


def affine(W, x, U, h, b):
    """Return W @ x + U @ h + b, validating that all shapes conform.

    W is (H, D) against input x of length D, U is (H, H) against state h of
    length H, b has length H. A mismatch raises ValueError naming the operand.
    """
    W = np.asarray(W, dtype=float)
    x = np.asarray(x, dtype=float)
    U = np.asarray(U, dtype=float)
    h = np.asarray(h, dtype=float)
    b = np.asarray(b, dtype=float)
    if W.ndim != 2:
        raise ValueError(f"affine: W must be 2-d, got shape {W.shape}")
    n_out, n_in = W.shape
    if x.shape != (n_in,):
        raise ValueError(f"affine: x has shape {x.shape}, expected ({n_in},) to match W")
    if U.shape != (n_out, n_out):
        raise ValueError(f"affine: U has shape {U.shape}, expected ({n_out}, {n_out})")
    if h.shape != (n_out,):
        raise ValueError(f"affine: h has shape {h.shape}, expected ({n_out},) to match U")
    if b.shape != (n_out,):
        raise ValueError(f"affine: b has shape {b.shape}, expected ({n_out},)")
    return W @ x + U @ h + b


class Rng:
    """SplitMix64 pseudo-random generator (Steele/Lea/Vigna constants).

    State is a single 64-bit counter advanced by the golden-gamma constant;
    each output is the counter passed through two xor-shift-multiply mixing
    steps. Implemented with plain Python integers for bit-reproducibility.
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        """Next raw 64-bit output; advances the state."""
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform draw in [lo, hi). Requires lo < hi."""
        if not lo < hi:
            raise ValueError(f"uniform: requires lo < hi, got lo={lo}, hi={hi}")
        u = (self.next_u64() >> 11) * 2.0 ** -53  # 53-bit mantissa in [0, 1)
        x = lo + (hi - lo) * u
        # guard the rare rounding of lo + (hi-lo)*u up to hi
        return x if x < hi else math.nextafter(hi, lo)

    def uniform_array(self, shape, lo: float, hi: float) -> np.ndarray:
        """Array of uniform draws, filled in row-major order."""
        n = int(np.prod(shape))
        flat = np.array([self.uniform(lo, hi) for _ in range(n)])
        return flat.reshape(shape)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the inclusive range [lo, hi]."""
        if lo > hi:
            raise ValueError(f"randint: requires lo <= hi, got lo={lo}, hi={hi}")
        return lo + self.next_u64() % (hi - lo + 1)

    def normal(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        """Gaussian draw via Box-Muller; consumes two uniforms, no caching."""
        u1 = 1.0 - self.uniform(0.0, 1.0)  # in (0, 1], keeps the log finite
        u2 = self.uniform(0.0, 1.0)
        r = math.sqrt(-2.0 * math.log(u1))
        return mu + sigma * r * math.cos(2.0 * math.pi * u2)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_u64() % (i + 1)
            items[i], items[j] = items[j], items[i]
