"""Brute-force information quantities of explicit joint distributions."""

import itertools
import math
from collections import defaultdict


def marginal(dist, idx):
    out = defaultdict(float)
    for outcome, p in dist.items():
        out[tuple(outcome[i] for i in idx)] += p
    return out


def entropy_of(dist, idx):
    return -sum(p * math.log2(p) for p in marginal(dist, sorted(idx)).values() if p > 0)


def entropy_vector(dist, n):
    """v[S - 1] = H(X_S) for every nonempty S."""
    return [entropy_of(dist, [i for i in range(n) if S >> i & 1]) for S in range(1, 1 << n)]


def direct_cmi(dist, A, B, C):
    """I(X_A : X_B | X_C) from the defining sum (union semantics)."""
    a, b, c = sorted(A), sorted(B), sorted(C)
    pabc = marginal(dist, a + b + c)
    pac = marginal(dist, a + c)
    pbc = marginal(dist, b + c)
    pc = marginal(dist, c)
    total = 0.0
    na, nb = len(a), len(b)
    for key, p in pabc.items():
        if p <= 0:
            continue
        ka, kb, kc = key[:na], key[na:na + nb], key[na + nb:]
        # union semantics: overlapping indices must agree, which the joint marginal enforces
        total += p * math.log2(p * pc[kc] / (pac[ka + kc] * pbc[kb + kc]))
    return total


def binary_distributions(n, weights):
    """Distribution on {0,1}^n with the given nonnegative weights (normalised)."""
    outcomes = list(itertools.product((0, 1), repeat=n))
    tot = sum(weights)
    return {o: w / tot for o, w in zip(outcomes, weights)}
