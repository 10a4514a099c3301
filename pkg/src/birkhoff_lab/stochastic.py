"""Monte Carlo checks of the probabilistic ingredients.

Randomness comes from ``numpy.random.default_rng([seed, chunk])`` with a
fixed chunk size.  A result therefore depends only on ``(seed, samples,
parameters)``, never on how many worker threads evaluated the chunks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, HorizonBudget, PreconditionError

Z95 = 1.96
CHUNK = 4096
MAX_HORIZON = 2**40


def default_threads() -> int:
    env = os.environ.get("BIRKHOFF_LAB_THREADS")
    return max(1, int(env)) if env else 1


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng([seed, chunk])


def _chunks(samples: int, size: int = CHUNK):
    return [(c, min(size, samples - c * size)) for c in range((samples + size - 1) // size)]


def _map_chunks(fn, samples: int, threads: int | None, size: int = CHUNK) -> list:
    jobs = _chunks(samples, size)
    threads = threads or default_threads()
    if threads == 1 or len(jobs) == 1:
        return [fn(c, n) for c, n in jobs]
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(lambda job: fn(*job), jobs))


@dataclass(frozen=True)
class MCResult:
    estimate: float
    samples: int
    half_width: float
    seed: int

    @classmethod
    def proportion(cls, hits: int, samples: int, seed: int) -> "MCResult":
        p = hits / samples
        return cls(p, samples, Z95 * math.sqrt(p * (1 - p) / samples), seed)

    @property
    def lower(self) -> float:
        return self.estimate - self.half_width

    @property
    def upper(self) -> float:
        return self.estimate + self.half_width

    def to_dict(self) -> dict:
        return {"estimate": self.estimate, "samples": self.samples, "half_width": self.half_width,
                "seed": self.seed}


# ---------------------------------------------------------------------------
# maximal inequality for orthonormal sums


@dataclass(frozen=True)
class MenshovResult:
    N: int
    mean: float                  # empirical E[max_n (sum_{j<=n} c_j X_j)**2]
    std_error: float
    bound: float                 # log2(4N)**2 * sum c**2
    trials: int
    seed: int

    @property
    def holds(self) -> bool:
        return self.mean - 3 * self.std_error <= self.bound

    def to_dict(self) -> dict:
        return {"N": self.N, "mean": self.mean, "std_error": self.std_error, "bound": self.bound,
                "holds": self.holds, "trials": self.trials, "seed": self.seed}


def coefficient_profile(name: str, N: int, seed: int = 0) -> np.ndarray:
    """``flat`` (all ones), ``harmonic`` (``1/j``) or ``random`` (uniform on [0, 1))."""
    if name == "flat":
        return np.ones(N)
    if name == "harmonic":
        return 1.0 / np.arange(1, N + 1)
    if name == "random":
        return np.random.default_rng([seed, N]).random(N)
    raise PreconditionError(f"unknown coefficient profile {name!r}")


def menshov_check(N: int, coeffs, trials: int = 10**4, seed: int = 0,
                  threads: int | None = None) -> MenshovResult:
    """Compare the maximal partial sum of a Rademacher series with its bound."""
    c = np.asarray(coeffs, float)
    if N < 1 or c.shape != (N,):
        raise PreconditionError("need N >= 1 and exactly N coefficients")
    if trials < 1000:
        raise PreconditionError("use at least 1000 trials")

    def work(chunk, n):
        x = chunk_rng(seed, chunk).choice(np.array([-1.0, 1.0]), size=(n, N))
        m = np.max(np.cumsum(x * c, axis=1) ** 2, axis=1)
        return m.sum(), (m**2).sum()

    parts = _map_chunks(work, trials, threads)
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s1 / trials
    var = max(s2 / trials - mean**2, 0.0) * trials / (trials - 1)
    bound = math.log2(4 * N) ** 2 * float(np.sum(c**2))
    return MenshovResult(N, mean, math.sqrt(var / trials), bound, trials, seed)


# ---------------------------------------------------------------------------
# iterated logarithm horizon


def _walk_sup_event(seed: int, M: int, N: int, trials: int, threshold, threads, block: int = 4096):
    """Hits of ``sup_{M<=n<=N} |W_n| / scale(n) > 1/2`` for Rademacher walks."""
    def work(chunk, n):
        rng = chunk_rng(seed, chunk)
        pos = np.zeros(n, np.int64)
        hit = np.zeros(n, bool)
        done = 0
        while done < N:
            step = min(block, N - done)
            w = pos[:, None] + np.cumsum(rng.integers(0, 2, size=(n, step), dtype=np.int8) * 2 - 1,
                                         axis=1, dtype=np.int64)
            idx = np.arange(done + 1, done + step + 1)
            live = idx >= M
            if live.any():
                sc = threshold(idx[live].astype(float))
                hit |= np.any(np.abs(w[:, live]) > sc, axis=1)
            pos = w[:, -1]
            done += step
        return int(hit.sum())
    return sum(_map_chunks(work, trials, threads, size=1024))


def _lil_threshold(n):
    return 0.5 * np.sqrt(n * np.log(np.log(n)))


def lil_probability(M: int, N: int, trials: int, seed: int, threads: int | None = None) -> MCResult:
    """``P(sup_{M<=n<=N} |W_n| / sqrt(n log log n) > 1/2)`` for a simple random walk."""
    if M < 16:
        raise PreconditionError("M >= 16 keeps log log n positive")
    if N < M:
        raise PreconditionError("need N >= M")
    return MCResult.proportion(_walk_sup_event(seed, M, N, trials, _lil_threshold, threads), trials, seed)


@dataclass(frozen=True)
class LILHorizon:
    N: int
    eps: float
    M: int
    first: MCResult
    confirm: MCResult
    schedule: tuple[tuple[int, float, float], ...] = field(repr=False)  # (N, estimate, half_width)

    def to_dict(self) -> dict:
        return {"N": self.N, "eps": self.eps, "M": self.M, "first": self.first.to_dict(),
                "confirm": self.confirm.to_dict(),
                "schedule": [{"N": n, "estimate": p, "half_width": h} for n, p, h in self.schedule]}


def confirm_seed(seed: int) -> int:
    """Seed of the independent re-simulation used to confirm a horizon."""
    return int(np.random.SeedSequence([seed, 0x4C494C]).generate_state(1)[0])


def lil_horizon(eps: float, M: int, trials: int = 10**4, seed: int = 0,
                threads: int | None = None, limit: int = MAX_HORIZON) -> LILHorizon:
    """Smallest ``N = M * 2**i`` whose event probability clears ``1 - eps``.

    A candidate must clear ``1 - eps`` by one half-width and an independent
    simulation at the same ``N`` must land above ``1 - eps`` as well.
    """
    if not 0 < eps < 1:
        raise PreconditionError("eps must lie in (0, 1)")
    if M < 16:
        raise PreconditionError("M >= 16 keeps log log n positive")
    N, sched = M, []
    while True:
        if N > limit:
            raise HorizonBudget(f"no horizon up to {limit} reaches probability {1 - eps}")
        first = lil_probability(M, N, trials, seed, threads)
        sched.append((N, first.estimate, first.half_width))
        if first.lower > 1 - eps:
            again = lil_probability(M, N, trials, confirm_seed(seed), threads)
            if again.estimate > 1 - eps:
                return LILHorizon(N, eps, M, first, again, tuple(sched))
        N *= 2


# ---------------------------------------------------------------------------
# rotated copies


def _check_normalized(f, points: int = 1 << 14) -> None:
    x = np.arange(points) / points
    v = np.asarray(f(x), float)
    if abs(v.mean()) > 1e-6:
        raise PreconditionError("f must have zero mean")
    if abs(float(np.mean(v * v)) - 1) > 1e-3:
        raise PreconditionError("f must have unit L2 norm")


def orthonormality_check(f, k_max: int = 8, samples: int = 10**6, seed: int = 0,
                         threads: int | None = None) -> np.ndarray:
    """Empirical Gram matrix of ``X_k(u, x) = f(x + k u)`` for ``k = 1..k_max``."""
    if k_max < 1:
        raise PreconditionError("k_max must be positive")
    _check_normalized(f)
    k = np.arange(1, k_max + 1)

    def work(chunk, n):
        rng = chunk_rng(seed, chunk)
        u, x = rng.random(n), rng.random(n)
        X = np.asarray(f((x[:, None] + k * u[:, None]) % 1.0), float)
        return X.T @ X

    return sum(_map_chunks(work, samples, threads, size=1 << 16)) / samples


def gram_deviation(G: np.ndarray) -> float:
    return float(np.max(np.abs(G - np.eye(len(G)))))


# ---------------------------------------------------------------------------
# dyadic blocks


@dataclass
class DyadicDecayTable:
    nu: float
    samples: int
    seed: int
    k: np.ndarray
    estimate: np.ndarray
    half_width: np.ndarray
    fit_k: int
    C: float

    def envelope(self, k=None) -> np.ndarray:
        k = self.k if k is None else np.asarray(k)
        return self.C * k.astype(float) ** 2 * 2.0 ** (k * (1 - 2 * self.nu))

    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.estimate)

    def rows(self) -> list[dict]:
        env = self.envelope()
        return [{"k": int(k), "estimate": float(p), "half_width": float(h), "envelope": float(e)}
                for k, p, h, e in zip(self.k, self.estimate, self.half_width, env)]


def dyadic_decay(f, nu: float, k_max: int = 14, samples: int = 10**4, seed: int = 0,
                 fit_k: int = 6, threads: int | None = None) -> DyadicDecayTable:
    """Estimate ``mu x mu(E_k)`` for ``k = 0..k_max`` in one orbit sweep per sample.

    ``E_k`` holds the pairs ``(u, x)`` with ``|S_n f(x)| >= n**nu`` for some
    ``n`` in ``[2**k, 2**(k+1))``, where the sum runs along the rotation by
    ``u``.  ``C`` is fitted so that the envelope passes through row ``fit_k``.
    """
    if not 0.5 < nu < 1:
        raise PreconditionError("nu must lie in (1/2, 1)")
    if not 0 <= k_max <= 20:
        raise BudgetExceeded("k_max above 20 is too costly")
    if not 0 <= fit_k <= k_max:
        raise PreconditionError("fit_k must lie in [0, k_max]")
    L = 2 ** (k_max + 1) - 1
    n = np.arange(1, L + 1)
    thresh = n.astype(float) ** nu
    batch = max(1, (1 << 22) // L)

    def work(chunk, cnt):
        rng = chunk_rng(seed, chunk)
        u, x = rng.random(cnt), rng.random(cnt)
        hits = np.zeros(k_max + 1, np.int64)
        for s in range(0, cnt, batch):
            uu, xx = u[s:s + batch, None], x[s:s + batch, None]
            vals = np.asarray(f((xx + (n - 1) * uu) % 1.0), float)
            over = np.abs(np.cumsum(vals, axis=1)) >= thresh
            per = np.zeros((len(uu), k_max + 1), bool)
            for k in range(k_max + 1):
                per[:, k] = over[:, (1 << k) - 1:(1 << (k + 1)) - 1].any(axis=1)
            hits += per.sum(axis=0)
        return hits

    hits = sum(_map_chunks(work, samples, threads, size=1024))
    p = hits / samples
    hw = Z95 * np.sqrt(p * (1 - p) / samples)
    k = np.arange(k_max + 1)
    C = float(p[fit_k]) / (fit_k**2 * 2.0 ** (fit_k * (1 - 2 * nu))) if fit_k > 0 else float(p[0])
    return DyadicDecayTable(nu, samples, seed, k, p, hw, fit_k, C)


# ---------------------------------------------------------------------------
# the key lemma on random step functions

SUBGRID = 62


@dataclass(frozen=True)
class KeyLemmaResult:
    overall: MCResult
    in_good: MCResult | None      # restricted to u in E_O
    control: MCResult | None      # restricted to u outside E_O
    threshold: float
    M: int
    N: int

    def to_dict(self) -> dict:
        d = lambda r: None if r is None else r.to_dict()
        return {"overall": d(self.overall), "in_good": d(self.in_good), "control": d(self.control),
                "threshold": self.threshold, "M": self.M, "N": self.N}


def key_lemma_demo(spec, M: int, samples: int = 1000, seed: int = 0,
                   threads: int | None = None) -> KeyLemmaResult:
    """Fraction of ``(u, x)`` with ``sup_{M<=n<=N} |S_n g(x)| / sqrt(n)`` above the threshold.

    ``u`` and ``x`` are drawn from the grid of ``2**-62``, so the arcs the
    orbit visits and the membership of ``u`` in ``E_O`` are decided exactly.
    The threshold is ``(eps/2) * sqrt(log log M)``.
    """
    from .fixed import FixedArray

    N, K, P = spec.N, spec.K, spec.precision
    if M < 16 or N < M:
        raise PreconditionError("need 16 <= M <= N")
    if P < SUBGRID:
        raise PreconditionError(f"precision must be at least {SUBGRID}")
    if K & (K - 1) or 2 * K > 1 << SUBGRID:
        raise PreconditionError("K must be a power of two below 2**61")
    thr = spec.eps / 2 * math.sqrt(math.log(math.log(M)))
    shift = SUBGRID - (2 * K).bit_length() + 1     # grid bits below the half-arc index
    mask = (1 << SUBGRID) - 1
    n = np.arange(N, dtype=np.uint64)
    half_sign = np.array([1.0, -1.0])
    signs = spec.signs.astype(float)

    def work(chunk, cnt):
        rng = chunk_rng(seed, chunk)
        u = rng.integers(0, 1 << SUBGRID, size=cnt, dtype=np.uint64)
        x = rng.integers(0, 1 << SUBGRID, size=cnt, dtype=np.uint64)
        pos = (x[:, None] + n * u[:, None]) & np.uint64(mask)
        half = (pos >> np.uint64(shift)).astype(np.int64)    # index of the half arc, 0..2K-1
        vals = spec.eps * signs[half // 2] * half_sign[half % 2]
        S = np.abs(np.cumsum(vals, axis=1))[:, M - 1:]
        hit = np.any(S / np.sqrt(np.arange(M, N + 1)) > thr, axis=1)
        words = FixedArray.from_ints([int(v) << (P - SUBGRID) for v in u], P)
        good = spec.good_shifts.contains(words)
        return np.array([hit.sum(), (hit & good).sum(), good.sum(), (hit & ~good).sum()])

    h, hg, ng, hc = sum(_map_chunks(work, samples, threads, size=1024)).tolist()
    overall = MCResult.proportion(h, samples, seed)
    in_good = MCResult.proportion(hg, ng, seed) if ng else None
    control = MCResult.proportion(hc, samples - ng, seed) if samples - ng else None
    return KeyLemmaResult(overall, in_good, control, thr, M, N)
