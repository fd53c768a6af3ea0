"""Shortest-path sampling from the importance and uniform distributions.

A sample is drawn in two steps.  First a pair ``(s, t)`` is chosen, either
with probability proportional to ``R(x_s - x_t)`` (importance) or uniformly
among ordered pairs of distinct nodes.  Then one shortest ``s -> t`` path is
picked uniformly at random with a balanced bidirectional BFS.

Pairs for importance sampling are found with two binary searches over suffix
sums of the sorted states (:class:`ImportanceIndex`), O(log n) per draw.

Batches are split into fixed chunks of sample indices and every sample reads
its own counter-based random stream, so the output does not depend on how
many worker threads process the chunks.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from . import rng as _rng
from .graph import Graph
from .states import PercolationStates

CHUNK = 8192
MAX_REDRAWS = 64

# stream ``k`` of a master seed uses sub-streams 2k (pairs) and 2k+1 (paths)


@dataclass(frozen=True, eq=False)
class ImportanceIndex:
    """Suffix sums over sorted states (0-indexed positions).

    ``w[i] = sum(xs[i:])``, ``ci[i] = sum_j>=i (xs[i] - xs[j])``,
    ``r[i] = sum(ci[i:])`` and ``c = r[0]``.  ``w`` and ``r`` carry a
    trailing zero.
    """

    xs: np.ndarray
    w: np.ndarray
    ci: np.ndarray
    r: np.ndarray
    c: float
    perm: np.ndarray

    @property
    def n(self) -> int:
        return len(self.xs)


def build_importance_index(ps: PercolationStates) -> ImportanceIndex:
    xs = np.ascontiguousarray(ps.sorted, dtype=np.float64)
    w, ci, r, c = _suffix_sums(xs)
    return ImportanceIndex(xs, w, ci, r, float(c), np.asarray(ps.perm, dtype=np.int64))


@numba.njit(cache=True)
def _suffix_sums(xs):
    n = len(xs)
    w = np.zeros(n + 1)
    ci = np.zeros(n)
    r = np.zeros(n + 1)
    c = 0.0
    for i in range(n - 1, -1, -1):
        w[i] = w[i + 1] + xs[i]
        # an all-tied suffix has no weight; avoid its rounding residue
        if xs[i] == xs[n - 1]:
            ci[i] = 0.0
        else:
            ci[i] = max((n - i) * xs[i] - w[i], 0.0)
        r[i] = r[i + 1] + ci[i]
        c += ci[i]
    return w, ci, r, c


@numba.njit(cache=True, nogil=True)
def _pair_search(xs, w, ci, r, c, u1, u2):
    """Two binary searches; returns sorted positions (s, t), or (-1, -1)."""
    n = len(xs)
    a = 0
    b = n - 1
    d = (a + b) // 2
    while a <= b:
        k = (c - r[d + 1]) / c
        if u1 <= k:
            b = d - 1
        else:
            a = d + 1
        d = (a + b) // 2
    s = b + 1
    if s >= n or ci[s] <= 0.0:
        return -1, -1
    a = s
    b = n - 1
    d = (a + b) // 2
    xs_s = xs[s]
    while a <= b:
        k = ((d - s + 1) * xs_s - w[s] + w[d + 1]) / ci[s]
        if u2 <= k:
            b = d - 1
        else:
            a = d + 1
        d = (a + b) // 2
    t = b + 1
    if t >= n or t == s:
        return -1, -1
    return s, t


def sample_pair_importance(idx: ImportanceIndex, u1: float, u2: float) -> tuple[int, int]:
    """Map two uniforms to sorted positions ``(s, t)`` with ``s < t``.

    Raises ``ValueError`` on the measure-zero boundary case where the search
    lands on a position with no outgoing weight; callers redraw.
    """
    if not idx.c > 0:
        raise ValueError("importance sampling needs a positive total pair weight")
    s, t = _pair_search(idx.xs, idx.w, idx.ci, idx.r, idx.c, u1, u2)
    if s < 0:
        raise ValueError("degenerate draw, redraw with fresh variates")
    return int(s), int(t)


@numba.njit(cache=True, nogil=True)
def _importance_pairs(xs, w, ci, r, c, perm, key, start, out_s, out_t):
    for j in range(len(out_s)):
        sk = _rng.sample_key(key, start + j)
        k = 0
        while True:
            s, t = _pair_search(xs, w, ci, r, c, _rng.uniform(sk, k), _rng.uniform(sk, k + 1))
            k += 2
            if s >= 0 or k >= 2 * MAX_REDRAWS:
                break
        out_s[j] = perm[s]
        out_t[j] = perm[t]


@numba.njit(cache=True, nogil=True)
def _uniform_pairs(n, key, start, out_s, out_t):
    for j in range(len(out_s)):
        sk = _rng.sample_key(key, start + j)
        s = min(int(_rng.uniform(sk, 0) * n), n - 1)
        t = min(int(_rng.uniform(sk, 1) * (n - 1)), n - 2)
        if t >= s:
            t += 1
        out_s[j] = s
        out_t[j] = t


def sample_pair_uniform(n: int, rng: np.random.Generator) -> tuple[int, int]:
    if n < 2:
        raise ValueError("need at least two nodes")
    s = int(rng.integers(n))
    t = int(rng.integers(n - 1))
    return s, t + (t >= s)


@numba.njit(cache=True, nogil=True)
def _pick(ptr, idx, dist, sig, x, u):
    # predecessor of x one level closer to the root, chosen with prob sig[w]/sig[x]
    level = dist[x] - 1
    target = u * sig[x]
    acc = 0.0
    last = -1
    for k in range(ptr[x], ptr[x + 1]):
        w = idx[k]
        if dist[w] == level:
            acc += sig[w]
            last = w
            if target < acc:
                return w
    return last


@numba.njit(cache=True, nogil=True)
def _one_path(fp, fi, bp, bi, s, t, sk, dist_f, dist_b, sig_f, sig_b, qf, qb, out):
    """Uniform shortest s->t path by balanced bidirectional BFS.

    Writes the internal nodes (in path order) to ``out`` and returns
    ``(internal_count, hops, sigma)``; ``hops == -1`` when t is unreachable.
    Scratch arrays are restored to their initial state on return.
    """
    dist_f[s] = 0
    sig_f[s] = 1.0
    qf[0] = s
    nf = 1
    fs, fe, lf = 0, 1, 0
    dist_b[t] = 0
    sig_b[t] = 1.0
    qb[0] = t
    nb = 1
    bs, be, lb = 0, 1, 0
    side = 0
    while fs < fe and bs < be:
        degf = 0
        for j in range(fs, fe):
            u = qf[j]
            degf += fp[u + 1] - fp[u]
        degb = 0
        for j in range(bs, be):
            u = qb[j]
            degb += bp[u + 1] - bp[u]
        if degf <= degb:
            for j in range(fs, fe):
                u = qf[j]
                for k in range(fp[u], fp[u + 1]):
                    v = fi[k]
                    if dist_b[v] >= 0:
                        side = 1
                    if dist_f[v] < 0:
                        dist_f[v] = lf + 1
                        sig_f[v] = sig_f[u]
                        qf[nf] = v
                        nf += 1
                    elif dist_f[v] == lf + 1:
                        sig_f[v] += sig_f[u]
            if side:
                break
            fs, fe = fe, nf
            lf += 1
        else:
            for j in range(bs, be):
                u = qb[j]
                for k in range(bp[u], bp[u + 1]):
                    v = bi[k]
                    if dist_f[v] >= 0:
                        side = 2
                    if dist_b[v] < 0:
                        dist_b[v] = lb + 1
                        sig_b[v] = sig_b[u]
                        qb[nb] = v
                        nb += 1
                    elif dist_b[v] == lb + 1:
                        sig_b[v] += sig_b[u]
            if side:
                break
            bs, be = be, nb
            lb += 1

    count = 0
    hops = -1
    sigma = 0.0
    if side:
        # every shortest path crosses exactly one edge (u, v) with
        # dist_f[u] == lf and dist_b[v] == lb
        mu = -1
        mv = -1
        target = 0.0
        for rep in range(2):
            acc = 0.0
            if rep == 1:
                target = _rng.uniform(sk, 0) * sigma
            if side == 1:
                for j in range(fs, fe):
                    u = qf[j]
                    for k in range(fp[u], fp[u + 1]):
                        v = fi[k]
                        if dist_b[v] == lb:
                            acc += sig_f[u] * sig_b[v]
                            if rep == 1 and (target < acc or mu < 0):
                                mu, mv = u, v
                                if target < acc:
                                    break
                    if rep == 1 and target < acc:
                        break
            else:
                for j in range(bs, be):
                    v = qb[j]
                    for k in range(bp[v], bp[v + 1]):
                        u = bi[k]
                        if dist_f[u] == lf:
                            acc += sig_f[u] * sig_b[v]
                            if rep == 1 and (target < acc or mu < 0):
                                mu, mv = u, v
                                if target < acc:
                                    break
                    if rep == 1 and target < acc:
                        break
            if rep == 0:
                sigma = acc
        hops = lf + lb + 1
        count = hops - 1
        draw = 1
        # forward half: walk u back to s, fill out[lf-1] .. out[0]
        x = mu
        pos = lf - 1
        while dist_f[x] > 0:
            out[pos] = x
            pos -= 1
            x = _pick(bp, bi, dist_f, sig_f, x, _rng.uniform(sk, draw))
            draw += 1
        # backward half: walk v forward to t
        x = mv
        pos = lf
        while dist_b[x] > 0:
            out[pos] = x
            pos += 1
            x = _pick(fp, fi, dist_b, sig_b, x, _rng.uniform(sk, draw))
            draw += 1

    for j in range(nf):
        dist_f[qf[j]] = -1
        sig_f[qf[j]] = 0.0
    for j in range(nb):
        dist_b[qb[j]] = -1
        sig_b[qb[j]] = 0.0
    return count, hops, sigma


@numba.njit(cache=True, nogil=True)
def _paths(fp, fi, bp, bi, n, key, start, ss, ts, counts, hops, sigmas):
    """Sample one path per pair; returns the concatenated internal nodes."""
    dist_f = np.full(n, -1, dtype=np.int64)
    dist_b = np.full(n, -1, dtype=np.int64)
    sig_f = np.zeros(n)
    sig_b = np.zeros(n)
    qf = np.empty(n, dtype=np.int64)
    qb = np.empty(n, dtype=np.int64)
    out = np.empty(n, dtype=np.int64)
    cap = max(16, 4 * len(ss))
    buf = np.empty(cap, dtype=np.int32)
    pos = 0
    for j in range(len(ss)):
        sk = _rng.sample_key(key, start + j)
        c, h, sg = _one_path(fp, fi, bp, bi, ss[j], ts[j], sk,
                             dist_f, dist_b, sig_f, sig_b, qf, qb, out)
        counts[j] = c
        hops[j] = h
        sigmas[j] = sg
        if pos + c > cap:
            while pos + c > cap:
                cap *= 2
            grown = np.empty(cap, dtype=np.int32)
            grown[:pos] = buf[:pos]
            buf = grown
        for k in range(c):
            buf[pos + k] = out[k]
        pos += c
    return buf[:pos].copy()


@dataclass(frozen=True)
class PathSample:
    s: int
    t: int
    internal: tuple[int, ...]
    empty: bool
    sigma: float = 0.0

    @property
    def internal_count(self) -> int:
        return len(self.internal)


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """``len(s)`` path samples stored as flat arrays.

    The internal nodes of sample ``i`` are ``nodes[offsets[i]:offsets[i+1]]``.
    ``hops[i]`` is the s-t distance, -1 when t is unreachable from s.
    """

    s: np.ndarray
    t: np.ndarray
    offsets: np.ndarray
    nodes: np.ndarray
    hops: np.ndarray
    sigma: np.ndarray
    distribution: str
    n: int
    seed: int = 0
    start: int = 0
    stream: int = 0
    sample_time: float = 0.0
    bfs_time: float = 0.0

    def __len__(self) -> int:
        return len(self.s)

    def __getitem__(self, i: int) -> PathSample:
        lo, hi = self.offsets[i], self.offsets[i + 1]
        return PathSample(int(self.s[i]), int(self.t[i]),
                          tuple(int(v) for v in self.nodes[lo:hi]),
                          bool(self.hops[i] < 0), float(self.sigma[i]))

    @property
    def internal_counts(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def empty(self) -> np.ndarray:
        return self.hops < 0

    def node_counts(self) -> np.ndarray:
        """How many samples each node is internal to."""
        return np.bincount(self.nodes, minlength=self.n)

    def weighted_counts(self, x) -> np.ndarray:
        """Per node, the sum of ``R(x_s - x_t)`` over samples it is internal to."""
        pair_w = np.maximum(x[self.s] - x[self.t], 0.0)
        return np.bincount(self.nodes, weights=np.repeat(pair_w, self.internal_counts), minlength=self.n)


def random_shortest_path(g: Graph, s: int, t: int, rng: np.random.Generator | int | None = None) -> PathSample:
    """One shortest ``s -> t`` path chosen uniformly from all of them."""
    if s == t:
        raise ValueError("random_shortest_path requires s != t")
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise IndexError("node out of range")
    gen = np.random.default_rng(rng)
    key = np.uint64(int(gen.integers(0, 2**63)))
    counts = np.zeros(1, dtype=np.int64)
    hops = np.zeros(1, dtype=np.int64)
    sig = np.zeros(1)
    nodes = _paths(g.fwd_ptr, g.fwd_idx, g.bwd_ptr, g.bwd_idx, g.n, key, 0,
                   np.array([s], dtype=np.int64), np.array([t], dtype=np.int64), counts, hops, sig)
    return PathSample(s, t, tuple(int(v) for v in nodes), bool(hops[0] < 0), float(sig[0]))


def _chunks(ell: int, start: int):
    return [(lo, min(lo + CHUNK, start + ell)) for lo in range(start, start + ell, CHUNK)]


def iter_batches(g: Graph, ps: PercolationStates | None, ell: int, dist: str = "importance",
                 seed: int = 0, workers: int = 1, start: int = 0,
                 index: ImportanceIndex | None = None, stream: int = 0,
                 group: int = 8):
    """Yield consecutive :class:`SampleBatch` pieces that together hold ``ell`` samples.

    Each piece covers ``group * workers`` fixed-size chunks of sample indices;
    within a piece, pairs are drawn for all chunks first and paths second, so
    the two timings of a piece do not overlap.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if dist not in ("importance", "uniform"):
        raise ValueError(f"dist must be 'importance' or 'uniform', got {dist!r}")
    if g.n < 2:
        raise ValueError("graph needs at least two nodes")
    pair_key = _rng.stream_key(seed, 2 * stream)
    path_key = _rng.stream_key(seed, 2 * stream + 1)
    if dist == "importance":
        if ps is None:
            raise ValueError("importance sampling needs percolation states")
        idx = index if index is not None else build_importance_index(ps)
        if not idx.c > 0:
            raise ValueError("importance sampling needs a positive total pair weight")

        def pairs(lo, hi, out_s, out_t):
            _importance_pairs(idx.xs, idx.w, idx.ci, idx.r, idx.c, idx.perm, pair_key, lo, out_s, out_t)
    else:
        def pairs(lo, hi, out_s, out_t):
            _uniform_pairs(g.n, pair_key, lo, out_s, out_t)

    def paths(lo, hi, ss, ts, counts, hops, sig):
        return _paths(g.fwd_ptr, g.fwd_idx, g.bwd_ptr, g.bwd_idx, g.n, path_key, lo,
                      ss, ts, counts, hops, sig)

    jobs = _chunks(ell, start)
    step = max(1, group * max(1, workers))
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def run(fn, args):
        if pool is None or len(args) <= 1:
            return [fn(*a) for a in args]
        return list(pool.map(lambda a: fn(*a), args))

    try:
        for k in range(0, len(jobs), step):
            part = jobs[k:k + step]
            lo0, hi0 = part[0][0], part[-1][1]
            size = hi0 - lo0
            ss = np.empty(size, dtype=np.int64)
            ts = np.empty(size, dtype=np.int64)
            counts = np.empty(size, dtype=np.int64)
            hops = np.empty(size, dtype=np.int64)
            sig = np.empty(size)
            sl = [slice(lo - lo0, hi - lo0) for lo, hi in part]
            t0 = time.perf_counter()
            run(pairs, [(lo, hi, ss[q], ts[q]) for (lo, hi), q in zip(part, sl)])
            t1 = time.perf_counter()
            nodes = run(paths, [(lo, hi, ss[q], ts[q], counts[q], hops[q], sig[q])
                                for (lo, hi), q in zip(part, sl)])
            t2 = time.perf_counter()
            offsets = np.zeros(size + 1, dtype=np.int64)
            np.cumsum(counts, out=offsets[1:])
            yield SampleBatch(ss, ts, offsets, np.concatenate(nodes), hops, sig, dist, g.n,
                              seed, lo0, stream, sample_time=t1 - t0, bfs_time=t2 - t1)
    finally:
        if pool is not None:
            pool.shutdown()


def concat_batches(parts: list[SampleBatch]) -> SampleBatch:
    if len(parts) == 1:
        return parts[0]
    first = parts[0]
    counts = np.concatenate([p.internal_counts for p in parts])
    offsets = np.zeros(len(counts) + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return SampleBatch(np.concatenate([p.s for p in parts]), np.concatenate([p.t for p in parts]),
                       offsets, np.concatenate([p.nodes for p in parts]),
                       np.concatenate([p.hops for p in parts]), np.concatenate([p.sigma for p in parts]),
                       first.distribution, first.n, first.seed, first.start, first.stream,
                       sample_time=sum(p.sample_time for p in parts),
                       bfs_time=sum(p.bfs_time for p in parts))


def draw_batch(g: Graph, ps: PercolationStates | None, ell: int, dist: str = "importance",
               seed: int = 0, workers: int = 1, start: int = 0,
               index: ImportanceIndex | None = None, stream: int = 0) -> SampleBatch:
    """Draw ``ell`` i.i.d. path samples.

    Sample ``i`` (counting from ``start``) is a function of ``(seed, stream, i)``
    only, so ``draw_batch(..., ell=a)`` followed by
    ``draw_batch(..., ell=b, start=a)`` reproduces ``draw_batch(..., ell=a+b)``,
    whatever the number of workers.  Pairs with no path count toward ``ell``
    as empty samples.
    """
    return concat_batches(list(iter_batches(g, ps, ell, dist, seed, workers, start, index, stream)))


@dataclass(eq=False)
class SampleSummary:
    """Running totals of a stream of samples, enough for every estimator.

    ``weighted[v]`` sums ``R(x_s - x_t)`` over samples with ``v`` internal.
    """

    n: int
    distribution: str
    ell: int = 0
    counts: np.ndarray | None = None
    weighted: np.ndarray | None = None
    internal_sum: float = 0.0
    internal_sumsq: float = 0.0
    internal_max: int = 0
    empty_count: int = 0
    sample_time: float = 0.0
    bfs_time: float = 0.0

    def __post_init__(self):
        if self.counts is None:
            self.counts = np.zeros(self.n, dtype=np.int64)
        if self.weighted is None:
            self.weighted = np.zeros(self.n)

    def __len__(self) -> int:
        return self.ell

    def add(self, batch: SampleBatch, x: np.ndarray | None = None) -> "SampleSummary":
        if batch.distribution != self.distribution:
            raise ValueError("cannot mix importance and uniform samples")
        self.ell += len(batch)
        self.counts += batch.node_counts()
        if x is not None:
            self.weighted += batch.weighted_counts(x)
        c = batch.internal_counts
        self.internal_sum += float(c.sum())
        self.internal_sumsq += float(np.dot(c, c))
        if len(c):
            self.internal_max = max(self.internal_max, int(c.max()))
        self.empty_count += int(batch.empty.sum())
        self.sample_time += batch.sample_time
        self.bfs_time += batch.bfs_time
        return self

    def node_counts(self) -> np.ndarray:
        return self.counts

    def weighted_counts(self, x=None) -> np.ndarray:
        return self.weighted


def summarize(g: Graph, ps: PercolationStates, ell: int, dist: str = "importance",
              seed: int = 0, workers: int = 1, start: int = 0,
              index: ImportanceIndex | None = None, stream: int = 0,
              into: SampleSummary | None = None) -> SampleSummary:
    """Draw ``ell`` samples like :func:`draw_batch` but keep only running totals."""
    acc = into if into is not None else SampleSummary(g.n, dist)
    for piece in iter_batches(g, ps, ell, dist, seed, workers, start, index, stream):
        acc.add(piece, ps.raw)
    return acc
