"""One-dimensional single-parameter MPNN under explicit p-bit arithmetic.

A layer maps each node feature to ``a(W1 * f(v) + W2 * sum_{u in N(v)} f(u))``
with either ``W1 = W2 = gamma`` ("simplified") or ``W1 = gamma * n,
W2 = gamma`` ("theory"). Every sum of several terms is evaluated as one
correctly rounded MPFR sum, so the result depends only on the multiset of
summands, never on node order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import gmpy2
from gmpy2 import mpfr

from .graph import Graph
from .precision import GUARD_BITS, PrecisionContext

ACTIVATIONS = ("sigmoid", "arctan")
SCHEMES = ("simplified", "theory")
ENCODINGS = ("auto", "constant-one", "sqrt-primes")


@dataclass(frozen=True)
class MpnnConfig:
    gamma: float | tuple[float, ...]
    activation: str = "sigmoid"
    scheme: str = "simplified"
    encoding: str = "auto"

    def __post_init__(self):
        gammas = self.gamma if isinstance(self.gamma, tuple) else (self.gamma,)
        if not gammas:
            raise ValueError("need at least one gamma")
        for g in gammas:
            if not 0 < float(g) < 1:
                raise ValueError(f"gamma must lie in (0, 1), got {g}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown weight scheme {self.scheme!r}")
        if self.encoding not in ENCODINGS:
            raise ValueError(f"unknown encoding {self.encoding!r}")

    def gamma_at(self, layer: int):
        """Gamma for layer ``layer`` (0-based); a scalar gamma is shared by all."""
        if isinstance(self.gamma, tuple):
            if layer >= len(self.gamma):
                raise ValueError(f"per-layer gamma list has no entry for layer {layer + 1}")
            return self.gamma[layer]
        return self.gamma


@dataclass(frozen=True)
class FeatureAssignment:
    values: tuple
    round: int
    bits: int

    def __len__(self):
        return len(self.values)

    def num_classes(self) -> int:
        return len(set(self.values))


_MPFR = type(mpfr(0))


def _exact(x) -> mpfr:
    """``x`` as an mpfr without rounding (ints and floats are exact)."""
    if isinstance(x, _MPFR):
        return x
    if isinstance(x, int):
        return mpfr(x, max(2, abs(x).bit_length()))
    if isinstance(x, float):
        return mpfr(x, 53)
    return mpfr(x, 256)


def _sigmoid(x: mpfr, ctx: PrecisionContext) -> mpfr:
    # 1/(1+e^-x) == e^x/(1+e^x), without overflow for large x. Three roundings
    # at w bits keep the relative error under 2^(3-w); widen w until both ends
    # of that interval round to the same p-bit value.
    extra = GUARD_BITS
    while True:
        with ctx.scope(extra):
            r = 1 / (1 + gmpy2.exp(-x))
        w = ctx.bits + extra
        with ctx.scope(extra + 8):
            slack = gmpy2.mul_2exp(r, 3 - w)
            lo, hi = r - slack, r + slack
        lo, hi = mpfr(lo, ctx.bits), mpfr(hi, ctx.bits)
        if lo == hi or extra >= 8 * ctx.bits + 256:
            with ctx.scope():
                return mpfr(r, ctx.bits)
        extra *= 2


def activation_eval(x, kind: str, ctx: PrecisionContext) -> mpfr:
    """Activation of the exact input ``x``, rounded to ``ctx.bits``."""
    x = _exact(x)
    if kind == "sigmoid":
        return _sigmoid(x, ctx)
    if kind == "arctan":
        with ctx.scope():
            return gmpy2.atan(x)
    raise ValueError(f"unknown activation {kind!r}")


def first_primes(k: int) -> list[int]:
    out, p = [], 1
    for _ in range(k):
        p = int(gmpy2.next_prime(p))
        out.append(p)
    return out


def sqrt_prime_codes(k: int, ctx: PrecisionContext) -> list[mpfr]:
    """``sqrt(2), sqrt(3), sqrt(5), ...`` correctly rounded; k values."""
    with ctx.scope():
        return [gmpy2.sqrt(mpfr(p)) for p in first_primes(k)]


def init_features(g: Graph, encoding: str, ctx: PrecisionContext) -> FeatureAssignment:
    if encoding == "auto":
        encoding = "sqrt-primes" if g.is_labeled else "constant-one"
    if encoding == "constant-one":
        with ctx.scope():
            one = mpfr(1)
        return FeatureAssignment((one,) * g.n, 0, ctx.bits)
    if encoding == "sqrt-primes":
        # label id L -> sqrt of the (L+1)-th prime, independent of the graph
        labels = g.initial_colors()
        codes = sqrt_prime_codes(max(labels, default=-1) + 1, ctx)
        return FeatureAssignment(tuple(codes[lab] for lab in labels), 0, ctx.bits)
    raise ValueError(f"unknown encoding {encoding!r}")


def layer_weights(cfg: MpnnConfig, layer: int, n_nodes: int, ctx: PrecisionContext) -> tuple[mpfr, mpfr]:
    with ctx.scope():
        gamma = mpfr(cfg.gamma_at(layer))
        if cfg.scheme == "theory":
            return gamma * n_nodes, gamma
        return gamma, gamma


def mpnn_step(g: Graph, f: FeatureAssignment, cfg: MpnnConfig, ctx: PrecisionContext,
              n_nodes: int | None = None) -> FeatureAssignment:
    """One layer. ``n_nodes`` overrides ``g.n`` in the theory scheme."""
    if len(f) != g.n:
        raise ValueError("feature assignment does not cover the graph's nodes")
    w1, w2 = layer_weights(cfg, f.round, g.n if n_nodes is None else n_nodes, ctx)
    vals = f.values
    adj = g.adjacency
    cache: dict = {}
    out = []
    with ctx.scope():
        for v in range(g.n):
            s = w1 * vals[v] + w2 * gmpy2.fsum([vals[u] for u in adj[v]])
            r = cache.get(s)
            if r is None:
                r = cache[s] = activation_eval(s, cfg.activation, ctx)
            out.append(r)
    return FeatureAssignment(tuple(out), f.round + 1, ctx.bits)


def mpnn_run(g: Graph, cfg: MpnnConfig, rounds: int, ctx: PrecisionContext,
             n_nodes: int | None = None) -> list[FeatureAssignment]:
    if rounds < 0:
        raise ValueError("number of rounds must be non-negative")
    trace = [init_features(g, cfg.encoding, ctx)]
    for _ in range(rounds):
        trace.append(mpnn_step(g, trace[-1], cfg, ctx, n_nodes))
    return trace


def mpnn_readout(f: FeatureAssignment | Sequence, ctx: PrecisionContext) -> mpfr:
    vals = f.values if isinstance(f, FeatureAssignment) else f
    with ctx.scope():
        return gmpy2.fsum(list(vals))


def mpnn_distinguish(g1: Graph, g2: Graph, cfg: MpnnConfig, rounds: int, ctx: PrecisionContext) -> bool:
    """Run one network on both graphs; True iff the p-bit readouts differ.

    The theory scheme sizes its self-weight by ``g1.n + g2.n``, the node
    count of the disjoint union, so both graphs see identical weights.
    """
    n = g1.n + g2.n
    r1 = mpnn_readout(mpnn_run(g1, cfg, rounds, ctx, n)[-1], ctx)
    r2 = mpnn_readout(mpnn_run(g2, cfg, rounds, ctx, n)[-1], ctx)
    return r1 != r2
