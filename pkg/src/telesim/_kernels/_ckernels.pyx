# cython: boundscheck=False, wraparound=False, language_level=3
"""Compiled sampling kernels.

Statement-for-statement twins of ``_pykernels``: same uniform consumption
order, same comparisons, so both backends return bit-identical results.
"""


def count_successes(double[::1] u, double p):
    cdef Py_ssize_t i, n = u.shape[0]
    cdef long long successes = 0
    for i in range(n):
        if u[i] < p:
            successes += 1
    return successes


def draw_categories(double[::1] u, double[::1] cum):
    cdef Py_ssize_t i, n = u.shape[0]
    cdef Py_ssize_t idx, k = cum.shape[0]
    cdef long long counts[64]
    if k > 64:
        raise ValueError("draw_categories supports at most 64 categories")
    for idx in range(k):
        counts[idx] = 0
    cdef double x
    for i in range(n):
        x = u[i]
        idx = 0
        while idx < k - 1 and x >= cum[idx]:
            idx += 1
        counts[idx] += 1
    return [counts[idx] for idx in range(k)]


def teleport_verify(double[::1] u, double[::1] cum, double[::1] p_succ):
    cdef Py_ssize_t t, n = u.shape[0]
    cdef Py_ssize_t idx, n_branches = cum.shape[0]
    cdef long long counts[64]
    if n_branches > 64:
        raise ValueError("teleport_verify supports at most 64 branches")
    for idx in range(n_branches):
        counts[idx] = 0
    cdef long long successes = 0
    cdef double x
    for t in range(0, n, 2):
        x = u[t]
        idx = 0
        while idx < n_branches - 1 and x >= cum[idx]:
            idx += 1
        counts[idx] += 1
        if u[t + 1] < p_succ[idx]:
            successes += 1
    return [counts[idx] for idx in range(n_branches)], successes


def tomography_counts(double[::1] u, double p_first0, double[:, ::1] p_plus):
    cdef Py_ssize_t i, n_trials = u.shape[0] // 2
    cdef Py_ssize_t basis, n_bases = p_plus.shape[1]
    cdef long long counts[64][2]
    if n_bases > 64:
        raise ValueError("tomography_counts supports at most 64 bases")
    for basis in range(n_bases):
        counts[basis][0] = 0
        counts[basis][1] = 0
    cdef Py_ssize_t branch
    for i in range(n_trials):
        branch = 0 if u[2 * i] < p_first0 else 1
        basis = i % n_bases
        if u[2 * i + 1] < p_plus[branch, basis]:
            counts[basis][0] += 1
        else:
            counts[basis][1] += 1
    return [[counts[basis][0], counts[basis][1]] for basis in range(n_bases)]
