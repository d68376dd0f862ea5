"""Pure-Python kernels for the hot inner loops.

These mirror sdnlb._ckernels operation-for-operation (same accumulation
order) so the two backends produce identical floating-point results. Keep
both files in sync when changing a formula.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def simplified_loads(master_idx, alpha, n_controllers):
    """Per-controller sum of supervised flow rates."""
    loads = [0.0] * n_controllers
    master = master_idx.tolist()
    rates = alpha.tolist()
    for i in range(len(master)):
        loads[master[i]] += rates[i]
    return np.array(loads, dtype=np.float64)


def full_loads(master_idx, alpha, hops_sc, peer_hop_sum, nu, p_packet_kb,
               zeta_sync_kb, s1, s2, s3):
    """Weighted aggregation of polling, routing, and sync overheads.

    Returns (loads, f_data, f_packet, f_table, f_state), each a vector over
    controllers in KB/s.
    """
    n_switches, n_controllers = hops_sc.shape
    master = master_idx.tolist()
    rates = alpha.tolist()
    hsc = hops_sc.tolist()
    peers = peer_hop_sum.tolist()

    hop_sum = [0.0] * n_controllers        # sum of hops to supervised switches
    rate_hop_sum = [0.0] * n_controllers   # sum of alpha * hop over supervised
    for i in range(n_switches):
        m = master[i]
        h = hsc[i][m]
        hop_sum[m] += h
        rate_hop_sum[m] += rates[i] * h

    f_data = [0.0] * n_controllers
    f_packet = [0.0] * n_controllers
    f_table = [0.0] * n_controllers
    f_state = [0.0] * n_controllers
    loads = [0.0] * n_controllers
    for m in range(n_controllers):
        f_data[m] = nu * hop_sum[m]
        f_packet[m] = p_packet_kb * hop_sum[m]
        f_table[m] = rate_hop_sum[m] * peers[m]
        f_state[m] = zeta_sync_kb * peers[m]
        loads[m] = s1 * f_data[m] + s2 * (f_packet[m] + f_table[m]) + s3 * f_state[m]

    return (
        np.array(loads, dtype=np.float64),
        np.array(f_data, dtype=np.float64),
        np.array(f_packet, dtype=np.float64),
        np.array(f_table, dtype=np.float64),
        np.array(f_state, dtype=np.float64),
    )


def candidate_efficiencies(loads, source, alpha_i, hops_i, p_packet_kb):
    """Evaluate every immigration target for one switch of one controller.

    For each target n != source, applies the hypothetical load updates
    (source loses alpha*h_source, target gains alpha*h_target), recomputes
    the population variance over the full load vector, and returns

        tau[n]       variance change per unit migration cost
        cost[n]      request overhead plus hop-weighted load change, KB/s
        var_after[n] post-move population variance

    Entries at n == source are NaN.
    """
    m = len(loads)
    lds = loads.tolist()
    hops = hops_i.tolist()
    h_src = hops[source]
    src_after = lds[source] - alpha_i * h_src

    var_before = _pvariance(lds, m)

    tau = [float("nan")] * m
    cost = [float("nan")] * m
    var_after = [float("nan")] * m
    for n in range(m):
        if n == source:
            continue
        tgt_after = lds[n] + alpha_i * hops[n]
        total = 0.0
        for k in range(m):
            if k == source:
                total += src_after
            elif k == n:
                total += tgt_after
            else:
                total += lds[k]
        mean = total / m
        acc = 0.0
        for k in range(m):
            if k == source:
                d = src_after - mean
            elif k == n:
                d = tgt_after - mean
            else:
                d = lds[k] - mean
            acc += d * d
        v_after = acc / m
        mc = p_packet_kb + alpha_i * abs(hops[n] - h_src)
        var_after[n] = v_after
        cost[n] = mc
        tau[n] = abs(v_after - var_before) / mc

    return (
        np.array(tau, dtype=np.float64),
        np.array(cost, dtype=np.float64),
        np.array(var_after, dtype=np.float64),
    )


def _pvariance(values, m):
    total = 0.0
    for v in values:
        total += v
    mean = total / m
    acc = 0.0
    for v in values:
        d = v - mean
        acc += d * d
    return acc / m
