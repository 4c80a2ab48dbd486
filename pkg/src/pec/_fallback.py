"""Pure-numpy implementations of the hot kernels.

Selected automatically when the compiled ``pec._kernels`` module is not
available. Operation order mirrors the compiled kernels exactly.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

# below this many elements per worker, threading costs more than it saves
_MIN_CHUNK = 1 << 15


def _correct_chunk(y, out, c, under, K):
    tmp = np.empty_like(y)
    f = np.empty_like(y)

    def adv(z):
        # f = (c * z) * (1 - z)
        np.multiply(c, z, out=f)
        np.subtract(1.0, z, out=tmp)
        np.multiply(f, tmp, out=f)
        return f

    g = np.empty_like(y)
    if under:
        np.add(y, adv(y), out=g)
    else:
        np.subtract(y, adv(y), out=g)
    x = out
    x[...] = g
    for Kt in K:
        for _ in range(int(Kt)):
            if under:
                np.add(g, adv(x), out=x)
            else:
                np.subtract(g, adv(x), out=x)
        g[...] = x


def _spans(n, threads):
    workers = max(1, min(int(threads), n // _MIN_CHUNK))
    bounds = np.linspace(0, n, workers + 1).astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def correct_flat(y, out, c, under, K, threads):
    n = y.shape[0]
    if out.shape[0] != n:
        raise ValueError("output buffer has wrong length")
    spans = _spans(n, threads)
    if len(spans) <= 1:
        _correct_chunk(y, out, c, under, K)
        return
    with ThreadPoolExecutor(max_workers=len(spans)) as pool:
        futures = [
            pool.submit(_correct_chunk, y[a:b], out[a:b], c, under, K)
            for a, b in spans
        ]
        for fut in futures:
            fut.result()


def loe_count(a, b, threads):
    m = a.shape[0]
    if b.shape[0] != m:
        raise ValueError("lightness maps differ in length")
    total = 0
    # rows in blocks keep the boolean temporaries around 16 MB
    step = max(1, (1 << 24) // max(m, 1))
    for start in range(0, m, step):
        stop = min(m, start + step)
        oa = a[start:stop, None] >= a[None, :]
        ob = b[start:stop, None] >= b[None, :]
        total += int(np.count_nonzero(oa != ob))
    return total
