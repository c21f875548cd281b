# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled trial kernels: the keyed normal generator plus one fused loop per
policy.  Each loop mirrors the pure-Python policy classes operation for
operation (same expression grouping, same tie-breaking, same update order),
so a trial produces bit-identical (tau, eta, declared) on either backend;
``tests/test_backends.py`` enforces that.  Kernels return tau = -1 when the
max_rounds cap is hit; the harness turns that into NonTerminationError.
"""

import numpy as np

from libc.math cimport log, sqrt
from libc.stdint cimport int64_t, uint64_t

from scipy.special.cython_special cimport ndtri

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX_A = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX_B = 0x94D049BB133111EBULL
cdef double U53 = 1.0 / 9007199254740992.0  # 2^-53


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX_A
    z = (z ^ (z >> 27)) * MIX_B
    return z ^ (z >> 31)


cdef inline uint64_t _absorb(uint64_t h, uint64_t word) noexcept nogil:
    return _mix64((h ^ word) + GOLDEN)


cdef inline double _std_normal(uint64_t seed, uint64_t trial, int64_t arm,
                               int64_t t) noexcept nogil:
    cdef uint64_t h = _mix64(seed)
    h = _absorb(h, trial)
    h = _absorb(h, <uint64_t>arm)
    h = _absorb(h, <uint64_t>t)
    return ndtri((<double>(h >> 11) + 0.5) * U53)


def standard_normal(seed, trial, arm, t):
    """Scalar keyed draw; bit-identical to dvbandit._rng.standard_normal."""
    return _std_normal(<uint64_t>seed, <uint64_t>trial, <int64_t>arm, <int64_t>t)


def run_wtcs(double[::1] means, double sigma, seed, trial, wait_end, window):
    """Wait-then-sample trial: returns (tau, eta, declared 1-based)."""
    cdef uint64_t s = <uint64_t>seed
    cdef uint64_t tr = <uint64_t>trial
    cdef int64_t t0 = <int64_t>wait_end
    cdef int64_t w = <int64_t>window
    cdef Py_ssize_t k = means.shape[0]
    cdef Py_ssize_t j
    cdef int64_t t
    cdef double td, z
    sums_arr = np.zeros(k, dtype=np.float64)
    cdef double[::1] sums = sums_arr
    for t in range(t0 + 1, t0 + w + 1):
        td = <double>t
        for j in range(k):
            z = _std_normal(s, tr, <int64_t>(j + 1), t)
            sums[j] += means[j] + sigma / sqrt(td) * z
    cdef double wd = <double>w
    cdef Py_ssize_t best = 0
    cdef double best_mean = sums[0] / wd
    cdef double m
    for j in range(1, k):
        m = sums[j] / wd
        if m > best_mean:
            best = j
            best_mean = m
    return (int(t0 + w), int(k * w), int(best + 1))


def run_pswse(double[::1] means, double sigma, seed, trial, lam, delta,
              max_rounds):
    """Periodic weighted-elimination trial: returns (tau, eta, declared)."""
    cdef uint64_t s = <uint64_t>seed
    cdef uint64_t tr = <uint64_t>trial
    cdef int64_t lam_c = <int64_t>lam
    cdef double dlt = <double>delta
    cdef int64_t cap = <int64_t>max_rounds
    cdef Py_ssize_t k = means.shape[0]
    cdef Py_ssize_t j, survivor
    cdef int64_t t = 0, r = 0, eta = 0
    cdef Py_ssize_t n_active = k
    cdef double td, z, x, radius, leader_est, threshold, arg
    est_arr = np.zeros(k, dtype=np.float64)
    act_arr = np.ones(k, dtype=np.uint8)
    cdef double[::1] est = est_arr
    cdef unsigned char[::1] active = act_arr
    while True:
        t = t + lam_c
        if t > cap:
            return (-1, 0, 0)
        r = r + 1
        td = <double>t
        for j in range(k):
            if active[j]:
                z = _std_normal(s, tr, <int64_t>(j + 1), t)
                x = means[j] + sigma / sqrt(td) * z
                est[j] = ((<double>(r - 1)) / (<double>(r + 1)) * est[j]
                          + 2.0 / (<double>(r + 1)) * x)
        eta += n_active
        arg = 2.0 * (<double>k) * td * td / ((<double>(lam_c * lam_c)) * dlt)
        radius = sigma / td * sqrt((<double>lam_c) * log(arg))
        leader_est = 0.0
        survivor = -1
        for j in range(k):
            if active[j]:
                if survivor < 0 or est[j] > leader_est:
                    leader_est = est[j]
                    survivor = j
        threshold = leader_est - 2.0 * radius
        for j in range(k):
            if active[j] and est[j] < threshold:
                active[j] = 0
                n_active -= 1
        if n_active == 1:
            for j in range(k):
                if active[j]:
                    return (int(t), int(eta), int(j + 1))


def run_se(double[::1] means, double sigma, seed, trial, delta, max_rounds):
    """Successive-elimination trial: returns (tau, eta, declared)."""
    cdef uint64_t s = <uint64_t>seed
    cdef uint64_t tr = <uint64_t>trial
    cdef double dlt = <double>delta
    cdef int64_t cap = <int64_t>max_rounds
    cdef Py_ssize_t k = means.shape[0]
    cdef Py_ssize_t j, leader
    cdef int64_t t = 0, eta = 0
    cdef Py_ssize_t n_active = k
    cdef double td, z, x, inv_t = 0.0, variance, radius, leader_mean, threshold
    cdef double nd
    sums_arr = np.zeros(k, dtype=np.float64)
    m_arr = np.zeros(k, dtype=np.float64)
    act_arr = np.ones(k, dtype=np.uint8)
    cdef double[::1] sums = sums_arr
    cdef double[::1] m = m_arr
    cdef unsigned char[::1] active = act_arr
    while True:
        t = t + 1
        if t > cap:
            return (-1, 0, 0)
        td = <double>t
        inv_t += 1.0 / td
        for j in range(k):
            if active[j]:
                z = _std_normal(s, tr, <int64_t>(j + 1), t)
                x = means[j] + sigma / sqrt(td) * z
                sums[j] += x
        eta += n_active
        nd = <double>t
        variance = sigma * sigma * inv_t / (<double>(t * t))
        radius = sqrt(2.0 * variance * log(4.0 * (<double>k) * nd * nd / dlt))
        leader_mean = 0.0
        leader = -1
        for j in range(k):
            if active[j]:
                m[j] = sums[j] / nd
                if leader < 0 or m[j] > leader_mean:
                    leader_mean = m[j]
                    leader = j
        threshold = radius + radius
        for j in range(k):
            if active[j] and leader_mean - m[j] > threshold:
                active[j] = 0
                n_active -= 1
        if n_active == 1:
            for j in range(k):
                if active[j]:
                    return (int(t), int(eta), int(j + 1))


def run_lucb(double[::1] means, double sigma, seed, trial, delta, max_rounds):
    """Leader/challenger trial: returns (tau, eta, declared)."""
    cdef uint64_t s = <uint64_t>seed
    cdef uint64_t tr = <uint64_t>trial
    cdef double dlt = <double>delta
    cdef int64_t cap = <int64_t>max_rounds
    cdef Py_ssize_t k = means.shape[0]
    cdef Py_ssize_t j, leader, challenger, lo, hi
    cdef int64_t t = 1, eta = k
    cdef double td, z, x, variance, nd, challenger_ucb, ucb, lcb
    n_arr = np.zeros(k, dtype=np.int64)
    sums_arr = np.zeros(k, dtype=np.float64)
    invt_arr = np.zeros(k, dtype=np.float64)
    m_arr = np.zeros(k, dtype=np.float64)
    rad_arr = np.zeros(k, dtype=np.float64)
    cdef int64_t[::1] n = n_arr
    cdef double[::1] sums = sums_arr
    cdef double[::1] inv_t = invt_arr
    cdef double[::1] m = m_arr
    cdef double[::1] radii = rad_arr
    # round 1: sample every arm once
    td = 1.0
    for j in range(k):
        z = _std_normal(s, tr, <int64_t>(j + 1), 1)
        x = means[j] + sigma / sqrt(td) * z
        n[j] += 1
        sums[j] += x
        inv_t[j] += 1.0 / td
    while True:
        for j in range(k):
            nd = <double>n[j]
            m[j] = sums[j] / nd
            variance = sigma * sigma * inv_t[j] / (<double>(n[j] * n[j]))
            radii[j] = sqrt(2.0 * variance
                            * log(4.0 * (<double>k) * nd * nd / dlt))
        leader = 0
        for j in range(1, k):
            if m[j] > m[leader]:
                leader = j
        challenger = -1
        challenger_ucb = 0.0
        for j in range(k):
            if j == leader:
                continue
            ucb = m[j] + radii[j]
            if challenger < 0 or ucb > challenger_ucb:
                challenger = j
                challenger_ucb = ucb
        lcb = m[leader] - radii[leader]
        if lcb >= challenger_ucb:
            return (int(t), int(eta), int(leader + 1))
        t = t + 1
        if t > cap:
            return (-1, 0, 0)
        td = <double>t
        if leader < challenger:
            lo = leader
            hi = challenger
        else:
            lo = challenger
            hi = leader
        z = _std_normal(s, tr, <int64_t>(lo + 1), t)
        x = means[lo] + sigma / sqrt(td) * z
        n[lo] += 1
        sums[lo] += x
        inv_t[lo] += 1.0 / td
        z = _std_normal(s, tr, <int64_t>(hi + 1), t)
        x = means[hi] + sigma / sqrt(td) * z
        n[hi] += 1
        sums[hi] += x
        inv_t[hi] += 1.0 / td
        eta += 2
