"""Hot inner loops: radial-band bucketing and per-pixel Poisson sampling.

Each kernel ships in two builds, a numba ``@njit`` one and a pure-numpy one.
The environment variable ``SPECTOOL_BACKEND`` picks between them:

* ``auto`` (default) — numba when importable, numpy otherwise;
* ``numpy`` — force the fallback, never import numba;
* ``numba`` — demand the JIT and fail loudly if it is missing.

Both builds accumulate in the same element order and consume the same
precomputed transcendentals (exp(-lam), Box-Muller z), so their outputs are
bit-identical; the kernels are compiled without fastmath to keep that true.
``benchmarks/bench_backends.py`` compares their speed.
"""

from __future__ import annotations

import os

import numpy as np

from .rng import U64_GOLDEN, U64_MIX_A, U64_MIX_B, TWO_NEG53, mix64_np, unit_float_np

#: expected-count boundary between Knuth product sampling and the
#: rounded-normal approximation
KNUTH_CUTOVER = 30.0

_requested = os.environ.get("SPECTOOL_BACKEND", "auto").strip().lower() or "auto"
if _requested not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"SPECTOOL_BACKEND={_requested!r} is not one of auto, numba, numpy"
    )

_HAVE_NUMBA = False
if _requested != "numpy":
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise RuntimeError(
                "SPECTOOL_BACKEND=numba but numba is not installed"
            ) from None


def backend() -> str:
    """Name of the active kernel backend, ``numba`` or ``numpy``."""
    return "numba" if _HAVE_NUMBA else "numpy"


def _radial_sums_numpy(amplitude: np.ndarray, nbands: int):
    h, w = amplitude.shape
    dv = np.arange(h, dtype=np.int64) - h // 2
    du = np.arange(w, dtype=np.int64) - w // 2
    radius = np.sqrt((dv[:, None] * dv[:, None] + du[None, :] * du[None, :]).astype(np.float64))
    band = np.floor(radius + 0.5).astype(np.int64)
    keep = band < nbands
    sums = np.bincount(band[keep], weights=amplitude[keep], minlength=nbands)
    counts = np.bincount(band[keep], minlength=nbands).astype(np.int64)
    return sums, counts


def _poisson_counts_numpy(lam, neg_exp, zscores, keys):
    n = lam.shape[0]
    out = np.zeros(n, dtype=np.int64)

    large = lam > KNUTH_CUTOVER
    if large.any():
        approx = np.floor(lam[large] + np.sqrt(lam[large]) * zscores[large] + 0.5)
        out[large] = np.maximum(approx, 0.0).astype(np.int64)

    small = np.nonzero((lam > 0.0) & ~large)[0]
    if small.size:
        target = neg_exp[small]
        skey = keys[small]
        prod = np.ones(small.size, dtype=np.float64)
        draws = np.zeros(small.size, dtype=np.int64)
        active = np.arange(small.size)
        counter = np.uint64(0)
        while active.size:
            u = unit_float_np(mix64_np(skey[active] ^ counter))
            prod[active] *= u
            draws[active] += 1
            active = active[prod[active] > target[active]]
            counter += np.uint64(1)
        out[small] = draws - 1
    return out


if _HAVE_NUMBA:

    @njit(cache=True)
    def _mix64_nb(z):
        z = z + U64_GOLDEN
        z = (z ^ (z >> np.uint64(30))) * U64_MIX_A
        z = (z ^ (z >> np.uint64(27))) * U64_MIX_B
        return z ^ (z >> np.uint64(31))

    @njit(cache=True)
    def _radial_sums_numba(amplitude, nbands):
        h, w = amplitude.shape
        sums = np.zeros(nbands, dtype=np.float64)
        counts = np.zeros(nbands, dtype=np.int64)
        ch = h // 2
        cw = w // 2
        for i in range(h):
            dv = i - ch
            for j in range(w):
                du = j - cw
                band = int(np.floor(np.sqrt(float(dv * dv + du * du)) + 0.5))
                if band < nbands:
                    sums[band] += amplitude[i, j]
                    counts[band] += 1
        return sums, counts

    @njit(cache=True)
    def _poisson_counts_numba(lam, neg_exp, zscores, keys):
        n = lam.shape[0]
        out = np.zeros(n, dtype=np.int64)
        for p in range(n):
            lm = lam[p]
            if lm <= 0.0:
                out[p] = 0
            elif lm <= KNUTH_CUTOVER:
                target = neg_exp[p]
                prod = 1.0
                draws = 0
                counter = np.uint64(0)
                while True:
                    h = _mix64_nb(keys[p] ^ counter)
                    u = (np.float64(h >> np.uint64(11)) + 0.5) * TWO_NEG53
                    prod *= u
                    draws += 1
                    counter += np.uint64(1)
                    if prod <= target:
                        break
                out[p] = draws - 1
            else:
                approx = np.floor(lm + np.sqrt(lm) * zscores[p] + 0.5)
                if approx < 0.0:
                    approx = 0.0
                out[p] = np.int64(approx)
        return out


def radial_sums(amplitude: np.ndarray, nbands: int):
    """Per-band sums and populations of a DC-centered 2-D array.

    A bin at centered offset (du, dv) lands in band floor(hypot(du, dv) + 0.5);
    bands at ``nbands`` and beyond (the corners past the cutoff) are dropped.
    """
    amplitude = np.ascontiguousarray(amplitude, dtype=np.float64)
    if _HAVE_NUMBA:
        return _radial_sums_numba(amplitude, nbands)
    return _radial_sums_numpy(amplitude, nbands)


def poisson_counts(
    lam: np.ndarray, neg_exp: np.ndarray, zscores: np.ndarray, keys: np.ndarray
) -> np.ndarray:
    """Poisson draws for expected counts ``lam``, one per element.

    ``neg_exp`` must be exp(-lam) and ``zscores`` standard-normal draws, both
    precomputed by the caller (shared transcendentals keep the two backends
    bit-identical). Elements at or below :data:`KNUTH_CUTOVER` use Knuth
    product sampling on the element's counter stream; larger ones use the
    rounded, non-negativity-clamped normal approximation.
    """
    if _HAVE_NUMBA:
        return _poisson_counts_numba(lam, neg_exp, zscores, keys)
    return _poisson_counts_numpy(lam, neg_exp, zscores, keys)


def warmup() -> None:
    """Trigger JIT compilation so later calls run at full speed."""
    amp = np.ones((4, 4))
    radial_sums(amp, 3)
    lam = np.array([0.0, 5.0, 64.0])
    poisson_counts(lam, np.exp(-lam), np.zeros(3), np.arange(3, dtype=np.uint64))
