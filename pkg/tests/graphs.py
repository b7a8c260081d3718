"""Brute-force isomorphism classes of small simple graphs."""
import itertools

import numpy as np


def _pairs(n):
    return list(itertools.combinations(range(n), 2))


def isomorphism_classes(n):
    """One edge list per isomorphism class of simple graphs on n labelled vertices."""
    pairs = _pairs(n)
    index = {p: i for i, p in enumerate(pairs)}
    masks = np.arange(1 << len(pairs), dtype=np.int64)
    canon = masks.copy()
    for perm in itertools.permutations(range(n)):
        image = np.zeros_like(masks)
        for bit, (u, v) in enumerate(pairs):
            a, b = sorted((perm[u], perm[v]))
            image |= ((masks >> bit) & 1) << index[(a, b)]
        np.minimum(canon, image, out=canon)
    reps = np.unique(canon)
    return [[pairs[b] for b in range(len(pairs)) if (int(m) >> b) & 1] for m in reps]


def is_connected(edges, n):
    adj = {v: set() for v in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen, stack = {0}, [0]
    while stack:
        for w in adj[stack.pop()] - seen:
            seen.add(w)
            stack.append(w)
    return len(seen) == n
