"""Brute-force oracles shared by the tests.  None of them reuse package code
beyond the edge oracle itself."""

import itertools
import sys

import pytest

sys.setrecursionlimit(10000)


def dfs_longest(g):
    """Longest increasing path by plain depth-first search, no memo (d <= 9)."""
    d = g.d
    assert d <= 9

    def go(v):
        best = 0
        for c in range(d):
            if not (v >> c) & 1 and g.present(v, c):
                best = max(best, 1 + go(v | (1 << c)))
        return best

    return max(go(v) for v in range(1 << d))


def brute_count_antipodal(g):
    """Count 0 -> 1 paths by checking every coordinate order."""
    total = 0
    for perm in itertools.permutations(range(g.d)):
        v = 0
        for c in perm:
            if not g.present(v, c):
                break
            v |= 1 << c
        else:
            total += 1
    return total


def dfs_reach(g, u, v):
    """Is ``v`` reachable from ``u`` by increasing present edges inside Q(u, v)?"""
    stack, seen = [u], {u}
    while stack:
        x = stack.pop()
        if x == v:
            return True
        for c in range(g.d):
            b = 1 << c
            if (v & b) and not (x & b) and g.present(x, c) and x | b not in seen:
                seen.add(x | b)
                stack.append(x | b)
    return False


@pytest.fixture
def oracles():
    return sys.modules[__name__]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance") or sys.modules.get("test_acceptance")
    if mod and mod.LOG:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.LOG):
            terminalreporter.write_line(line)
