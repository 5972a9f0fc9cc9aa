"""Pure-Python reference versions of the compiled kernels in ``_kernels.pyx``.

Both modules expose the same three functions with identical results; the
package picks one at import time (see ``mubnet.kernels``).
"""
from __future__ import annotations

from typing import Sequence


def transversals(n_points: int, classes: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """All point sets meeting every line exactly once.

    ``classes`` holds each parallel class as a list of line bitmasks over
    ``n_points`` points.  One point is chosen per line of the first class;
    a choice is pruned as soon as it meets a line already hit.
    """
    if not classes:
        return []
    backbone = [[p for p in range(n_points) if (mask >> p) & 1] for mask in classes[0]]
    # bitmask over the lines of the remaining classes through each point
    point_lines = [0] * n_points
    bit = 0
    for cls in classes[1:]:
        for mask in cls:
            for p in range(n_points):
                if (mask >> p) & 1:
                    point_lines[p] |= 1 << bit
            bit += 1

    found: list[tuple[int, ...]] = []
    chosen: list[int] = []
    nlines = len(backbone)

    def dfs(i: int, used: int) -> None:
        if i == nlines:
            found.append(tuple(sorted(chosen)))
            return
        for p in backbone[i]:
            pl = point_lines[p]
            if pl & used:
                continue
            chosen.append(p)
            dfs(i + 1, used | pl)
            chosen.pop()

    dfs(0, 0)
    found.sort()
    return found


def _spf_sieve(n: int) -> list[int]:
    spf = list(range(n + 1))
    i = 2
    while i * i <= n:
        if spf[i] == i:
            for j in range(i * i, n + 1, i):
                if spf[j] == j:
                    spf[j] = i
        i += 1
    return spf


def divisor_gaps(dmax: int) -> list[int]:
    """``gaps[d] = d - (largest divisor of d*d below d)`` for 2 <= d <= dmax.

    Entries 0 and 1 are 0.  Divisors are generated from the factorisation of
    d, with every exponent doubled.
    """
    gaps = [0] * (dmax + 1)
    if dmax < 2:
        return gaps
    spf = _spf_sieve(dmax)
    for d in range(2, dmax + 1):
        n = d
        factors = []
        while n > 1:
            p = spf[n]
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, 2 * e))
        best = 1
        divs = [1]
        for p, e in factors:
            new = []
            for x in divs:
                y = x
                for _ in range(e + 1):
                    if y >= d:
                        break
                    new.append(y)
                    y *= p
            divs = new
        for x in divs:
            if best < x < d:
                best = x
        gaps[d] = d - best
    return gaps


def subgroup_closure(moduli: Sequence[int], generators: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Subgroup of Z_{m_1} x ... x Z_{m_r} generated by ``generators``,
    sorted lexicographically."""
    moduli = tuple(moduli)
    zero = tuple(0 for _ in moduli)
    gens = [tuple(g % m for g, m in zip(gen, moduli)) for gen in generators]
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple((a + b) % m for a, b, m in zip(x, g, moduli))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)
