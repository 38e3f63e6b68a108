# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled inner loops: walker sampling and map-equation move sweeps.

The pure-Python twin in ``_fallback.py`` mirrors these routines operation
for operation; both must produce bit-identical results for the same inputs.
"""

from libc.math cimport log

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double INV_LN2 = 1.0 / log(2.0)


cdef inline double plogp(double x) noexcept nogil:
    if x > 0.0:
        return x * log(x) * INV_LN2
    return 0.0


cdef inline Py_ssize_t _pick(const double[::1] cum, Py_ssize_t lo, Py_ssize_t hi,
                             double r) noexcept nogil:
    # First k in [lo, hi) with cum[k] > r; clamps to hi-1 for r at the top.
    cdef Py_ssize_t a = lo, b = hi, mid
    while a < b:
        mid = (a + b) >> 1
        if cum[mid] > r:
            b = mid
        else:
            a = mid + 1
    if a >= hi:
        a = hi - 1
    return a


def walk_chunk(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
               const double[::1] cumw, const double[::1] cum_pref,
               double alpha, bint record_all, const double[:, ::1] u,
               Py_ssize_t start, cnp.int64_t[::1] counts):
    """Advance the walker by u.shape[0] steps, tallying recorded arrivals.

    ``u`` holds two uniforms per step: the move-type draw and the target
    draw. Dangling nodes force a teleport (the move-type draw is ignored).
    Returns (final node, number of recorded arrivals in this chunk).
    """
    cdef Py_ssize_t nsteps = u.shape[0]
    cdef Py_ssize_t cur = start, target, s, lo, hi
    cdef long recorded = 0
    cdef bint via_link
    with nogil:
        for s in range(nsteps):
            lo = indptr[cur]
            hi = indptr[cur + 1]
            via_link = False
            if lo == hi:
                target = _pick(cum_pref, 0, cum_pref.shape[0], u[s, 1])
            elif u[s, 0] < alpha:
                target = indices[_pick(cumw, lo, hi, u[s, 1])]
                via_link = True
            else:
                target = _pick(cum_pref, 0, cum_pref.shape[0], u[s, 1])
            if via_link or record_all:
                counts[target] += 1
                recorded += 1
            cur = target
    return cur, recorded


def move_sweep(const cnp.int64_t[::1] order,
               const cnp.int64_t[::1] out_indptr, const cnp.int64_t[::1] out_indices,
               const double[::1] out_flow,
               const cnp.int64_t[::1] in_indptr, const cnp.int64_t[::1] in_indices,
               const double[::1] in_flow,
               const double[::1] node_flow, const double[::1] node_out,
               const double[::1] node_in,
               const double[::1] tele_t, const double[::1] tele_v, double t_total,
               cnp.int64_t[::1] module,
               double[::1] mod_flow, double[::1] mod_exit, double[::1] mod_enter,
               double[::1] mod_t, double[::1] mod_v, cnp.int64_t[::1] mod_size,
               cnp.int64_t[::1] free_ids, Py_ssize_t n_free,
               double eps,
               cnp.int64_t[::1] cand, double[::1] acc_out, double[::1] acc_in,
               cnp.int64_t[::1] stamp, cnp.int64_t tag):
    """One randomized local-move sweep minimizing the two-level codelength.

    Visits nodes in ``order`` and greedily applies the single best move of
    each node (to a neighbour module or a fresh empty module) whenever it
    lowers the codelength by more than ``eps`` bits. Module aggregates are
    maintained incrementally. Returns
    (moves, n_free, delta_sum, tag) with ``delta_sum`` the total codelength
    change of the sweep.
    """
    cdef Py_ssize_t nn = order.shape[0]
    cdef Py_ssize_t oi, i, e, ncand, ci
    cdef cnp.int64_t a, b, m, best_b
    cdef long moves = 0
    cdef double delta_sum = 0.0
    cdef double q, q_new, best_delta, delta
    cdef double enter_a, exit_a, enter_a_new, exit_a_new
    cdef double ex_a_link, en_a_link, t_a_new, v_a_new, f_a_new
    cdef double enter_b, exit_b, enter_b_new, exit_b_new
    cdef double ex_b_link, en_b_link, t_b_new, v_b_new, f_b_new, pmb_old
    cdef double ao_a, ai_a, ao_b, ai_b
    cdef bint consider_empty

    # Global module-entry rate; empty modules contribute zero.
    q = 0.0
    for m in range(mod_flow.shape[0]):
        q += mod_enter[m] + (t_total - mod_t[m]) * mod_v[m]

    with nogil:
        for oi in range(nn):
            i = order[oi]
            a = module[i]

            # Gather flow between i and each neighbouring module.
            ncand = 0
            for e in range(out_indptr[i], out_indptr[i + 1]):
                m = module[out_indices[e]]
                if stamp[m] != tag:
                    stamp[m] = tag
                    acc_out[m] = 0.0
                    acc_in[m] = 0.0
                    cand[ncand] = m
                    ncand += 1
                acc_out[m] += out_flow[e]
            for e in range(in_indptr[i], in_indptr[i + 1]):
                m = module[in_indices[e]]
                if stamp[m] != tag:
                    stamp[m] = tag
                    acc_out[m] = 0.0
                    acc_in[m] = 0.0
                    cand[ncand] = m
                    ncand += 1
                acc_in[m] += in_flow[e]
            if stamp[a] != tag:
                stamp[a] = tag
                acc_out[a] = 0.0
                acc_in[a] = 0.0
                cand[ncand] = a
                ncand += 1

            # Aggregates of module a with node i removed.
            enter_a = mod_enter[a] + (t_total - mod_t[a]) * mod_v[a]
            exit_a = mod_exit[a] + mod_t[a] * (1.0 - mod_v[a])
            ao_a = acc_out[a]
            ai_a = acc_in[a]
            ex_a_link = mod_exit[a] - (node_out[i] - ao_a) + ai_a
            en_a_link = mod_enter[a] - (node_in[i] - ai_a) + ao_a
            if ex_a_link < 0.0:
                ex_a_link = 0.0
            if en_a_link < 0.0:
                en_a_link = 0.0
            t_a_new = mod_t[a] - tele_t[i]
            v_a_new = mod_v[a] - tele_v[i]
            if t_a_new < 0.0:
                t_a_new = 0.0
            if v_a_new < 0.0:
                v_a_new = 0.0
            f_a_new = mod_flow[a] - node_flow[i]
            if f_a_new < 0.0:
                f_a_new = 0.0
            enter_a_new = en_a_link + (t_total - t_a_new) * v_a_new
            exit_a_new = ex_a_link + t_a_new * (1.0 - v_a_new)

            best_delta = -eps
            best_b = a
            consider_empty = mod_size[a] > 1 and n_free > 0

            for ci in range(ncand + (1 if consider_empty else 0)):
                if ci < ncand:
                    b = cand[ci]
                    if b == a:
                        continue
                    ao_b = acc_out[b]
                    ai_b = acc_in[b]
                    en_b_link = mod_enter[b]
                    ex_b_link = mod_exit[b]
                    t_b_new = mod_t[b] + tele_t[i]
                    v_b_new = mod_v[b] + tele_v[i]
                    f_b_new = mod_flow[b] + node_flow[i]
                    enter_b = en_b_link + (t_total - mod_t[b]) * mod_v[b]
                    exit_b = ex_b_link + mod_t[b] * (1.0 - mod_v[b])
                    pmb_old = exit_b + mod_flow[b]
                else:
                    b = -1  # fresh empty module, id assigned on move
                    ao_b = 0.0
                    ai_b = 0.0
                    en_b_link = 0.0
                    ex_b_link = 0.0
                    t_b_new = tele_t[i]
                    v_b_new = tele_v[i]
                    f_b_new = node_flow[i]
                    enter_b = 0.0
                    exit_b = 0.0
                    pmb_old = 0.0
                ex_b_link = ex_b_link + (node_out[i] - ao_b) - ai_b
                en_b_link = en_b_link + (node_in[i] - ai_b) - ao_b
                if ex_b_link < 0.0:
                    ex_b_link = 0.0
                if en_b_link < 0.0:
                    en_b_link = 0.0
                enter_b_new = en_b_link + (t_total - t_b_new) * v_b_new
                exit_b_new = ex_b_link + t_b_new * (1.0 - v_b_new)

                q_new = q - enter_a - enter_b + enter_a_new + enter_b_new
                if q_new < 0.0:
                    q_new = 0.0
                delta = (plogp(q_new) - plogp(q)
                         - (plogp(enter_a_new) + plogp(enter_b_new)
                            - plogp(enter_a) - plogp(enter_b))
                         - (plogp(exit_a_new) + plogp(exit_b_new)
                            - plogp(exit_a) - plogp(exit_b))
                         + (plogp(exit_a_new + f_a_new) + plogp(exit_b_new + f_b_new)
                            - plogp(exit_a + mod_flow[a]) - plogp(pmb_old)))
                if delta < best_delta:
                    best_delta = delta
                    best_b = b

            if best_b != a:
                b = best_b
                if b < 0:
                    n_free -= 1
                    b = free_ids[n_free]
                # Recompute the winning candidate's aggregates and apply.
                if stamp[b] == tag:
                    ao_b = acc_out[b]
                    ai_b = acc_in[b]
                else:
                    ao_b = 0.0
                    ai_b = 0.0
                en_b_link = mod_enter[b]
                ex_b_link = mod_exit[b]
                t_b_new = mod_t[b] + tele_t[i]
                v_b_new = mod_v[b] + tele_v[i]
                f_b_new = mod_flow[b] + node_flow[i]
                enter_b = en_b_link + (t_total - mod_t[b]) * mod_v[b]
                exit_b = ex_b_link + mod_t[b] * (1.0 - mod_v[b])
                ex_b_link = ex_b_link + (node_out[i] - ao_b) - ai_b
                en_b_link = en_b_link + (node_in[i] - ai_b) - ao_b
                if ex_b_link < 0.0:
                    ex_b_link = 0.0
                if en_b_link < 0.0:
                    en_b_link = 0.0
                enter_b_new = en_b_link + (t_total - t_b_new) * v_b_new
                exit_b_new = ex_b_link + t_b_new * (1.0 - v_b_new)
                q_new = q - enter_a - enter_b + enter_a_new + enter_b_new
                if q_new < 0.0:
                    q_new = 0.0

                mod_exit[a] = ex_a_link
                mod_enter[a] = en_a_link
                mod_t[a] = t_a_new
                mod_v[a] = v_a_new
                mod_flow[a] = f_a_new
                mod_size[a] -= 1
                if mod_size[a] == 0:
                    free_ids[n_free] = a
                    n_free += 1
                mod_exit[b] = ex_b_link
                mod_enter[b] = en_b_link
                mod_t[b] = t_b_new
                mod_v[b] = v_b_new
                mod_flow[b] = f_b_new
                mod_size[b] += 1
                module[i] = b
                q = q_new
                delta_sum += best_delta
                moves += 1
            tag += 1

    return moves, n_free, delta_sum, tag
