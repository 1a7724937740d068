"""Pure-Python sampling kernels (reference implementation).

These are the hot inner loops of the Monte Carlo experiments: millions of
Born-rule draws per run.  The compiled twin in ``_ckernels.pyx`` implements
the same loops statement for statement; both consume a pre-drawn array of
uniforms in the same order, so results are bit-identical across backends.
"""
from __future__ import annotations


def count_successes(u, p: float) -> int:
    """Number of entries of ``u`` below ``p`` (Bernoulli successes)."""
    successes = 0
    for x in u.tolist():
        if x < p:
            successes += 1
    return successes


def draw_categories(u, cum) -> list[int]:
    """Inverse-CDF draws against cumulative probabilities; returns counts."""
    cum_list = cum.tolist()
    k = len(cum_list)
    counts = [0] * k
    for x in u.tolist():
        idx = 0
        while idx < k - 1 and x >= cum_list[idx]:
            idx += 1
        counts[idx] += 1
    return counts


def teleport_verify(u, cum, p_succ) -> tuple[list[int], int]:
    """Teleport-then-verify trials.

    Each trial consumes two uniforms: one selects the Bell outcome by
    inverse CDF over ``cum``, one samples the +1 verification outcome with
    the branch's success probability ``p_succ[outcome]``.  Returns per-branch
    outcome counts and the total number of +1 results.
    """
    cum_list = cum.tolist()
    p_list = p_succ.tolist()
    n_branches = len(cum_list)
    counts = [0] * n_branches
    successes = 0
    u_list = u.tolist()
    for t in range(0, len(u_list), 2):
        x = u_list[t]
        idx = 0
        while idx < n_branches - 1 and x >= cum_list[idx]:
            idx += 1
        counts[idx] += 1
        if u_list[t + 1] < p_list[idx]:
            successes += 1
    return counts, successes


def tomography_counts(u, p_first0: float, p_plus) -> list[list[int]]:
    """Two-stage sampling for the no-signaling probe.

    Trial i: the first uniform picks the remote party's branch (0 with
    probability ``p_first0``), the basis cycles as ``i % n_bases``, and the
    second uniform samples the local +1 outcome with ``p_plus[branch][basis]``.
    Returns counts[basis][0 for +1, 1 for -1], marginalized over the branch.
    """
    p_rows = [row.tolist() for row in p_plus]
    n_bases = len(p_rows[0])
    counts = [[0, 0] for _ in range(n_bases)]
    u_list = u.tolist()
    for i in range(len(u_list) // 2):
        branch = 0 if u_list[2 * i] < p_first0 else 1
        basis = i % n_bases
        if u_list[2 * i + 1] < p_rows[branch][basis]:
            counts[basis][0] += 1
        else:
            counts[basis][1] += 1
    return counts
