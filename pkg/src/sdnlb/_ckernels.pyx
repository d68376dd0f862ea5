# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot inner loops.

Operation-for-operation twin of sdnlb._pykernels (same accumulation order,
same outputs). Keep both files in sync when changing a formula.
"""

from libc.math cimport fabs, NAN

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def simplified_loads(cnp.int64_t[:] master_idx, double[:] alpha, int n_controllers):
    """Per-controller sum of supervised flow rates."""
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(n_controllers, dtype=np.float64)
    cdef double[:] loads = out
    cdef Py_ssize_t i, n = master_idx.shape[0]
    for i in range(n):
        loads[master_idx[i]] += alpha[i]
    return out


def full_loads(cnp.int64_t[:] master_idx, double[:] alpha,
               double[:, :] hops_sc, double[:] peer_hop_sum,
               double nu, double p_packet_kb, double zeta_sync_kb,
               double s1, double s2, double s3):
    """Weighted aggregation of polling, routing, and sync overheads."""
    cdef Py_ssize_t n_switches = hops_sc.shape[0]
    cdef Py_ssize_t n_controllers = hops_sc.shape[1]
    cdef cnp.ndarray[double, ndim=1] loads_a = np.zeros(n_controllers)
    cdef cnp.ndarray[double, ndim=1] fdata_a = np.zeros(n_controllers)
    cdef cnp.ndarray[double, ndim=1] fpkt_a = np.zeros(n_controllers)
    cdef cnp.ndarray[double, ndim=1] ftab_a = np.zeros(n_controllers)
    cdef cnp.ndarray[double, ndim=1] fstate_a = np.zeros(n_controllers)
    cdef double[:] loads = loads_a
    cdef double[:] f_data = fdata_a
    cdef double[:] f_packet = fpkt_a
    cdef double[:] f_table = ftab_a
    cdef double[:] f_state = fstate_a

    cdef cnp.ndarray[double, ndim=1] hop_sum_a = np.zeros(n_controllers)
    cdef cnp.ndarray[double, ndim=1] rate_hop_a = np.zeros(n_controllers)
    cdef double[:] hsum = hop_sum_a
    cdef double[:] rhsum = rate_hop_a

    cdef Py_ssize_t i, m
    cdef double h
    for i in range(n_switches):
        m = master_idx[i]
        h = hops_sc[i, m]
        hsum[m] += h
        rhsum[m] += alpha[i] * h

    for m in range(n_controllers):
        f_data[m] = nu * hsum[m]
        f_packet[m] = p_packet_kb * hsum[m]
        f_table[m] = rhsum[m] * peer_hop_sum[m]
        f_state[m] = zeta_sync_kb * peer_hop_sum[m]
        loads[m] = s1 * f_data[m] + s2 * (f_packet[m] + f_table[m]) + s3 * f_state[m]

    return loads_a, fdata_a, fpkt_a, ftab_a, fstate_a


def candidate_efficiencies(double[:] loads, int source, double alpha_i,
                           double[:] hops_i, double p_packet_kb):
    """Evaluate every immigration target for one switch of one controller."""
    cdef Py_ssize_t m = loads.shape[0]
    cdef cnp.ndarray[double, ndim=1] tau_a = np.full(m, np.nan)
    cdef cnp.ndarray[double, ndim=1] cost_a = np.full(m, np.nan)
    cdef cnp.ndarray[double, ndim=1] vafter_a = np.full(m, np.nan)
    cdef double[:] tau = tau_a
    cdef double[:] cost = cost_a
    cdef double[:] var_after = vafter_a

    cdef double h_src = hops_i[source]
    cdef double src_after = loads[source] - alpha_i * h_src

    cdef double total = 0.0
    cdef Py_ssize_t k, n
    for k in range(m):
        total += loads[k]
    cdef double mean = total / m
    cdef double acc = 0.0
    cdef double d
    for k in range(m):
        d = loads[k] - mean
        acc += d * d
    cdef double var_before = acc / m

    cdef double tgt_after, v_after, mc
    for n in range(m):
        if n == source:
            continue
        tgt_after = loads[n] + alpha_i * hops_i[n]
        total = 0.0
        for k in range(m):
            if k == source:
                total += src_after
            elif k == n:
                total += tgt_after
            else:
                total += loads[k]
        mean = total / m
        acc = 0.0
        for k in range(m):
            if k == source:
                d = src_after - mean
            elif k == n:
                d = tgt_after - mean
            else:
                d = loads[k] - mean
            acc += d * d
        v_after = acc / m
        mc = p_packet_kb + alpha_i * fabs(hops_i[n] - h_src)
        var_after[n] = v_after
        cost[n] = mc
        tau[n] = fabs(v_after - var_before) / mc

    return tau_a, cost_a, vafter_a
