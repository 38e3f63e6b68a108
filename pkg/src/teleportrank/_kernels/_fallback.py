"""Pure-Python twins of the compiled kernels.

These mirror ``_core.pyx`` operation for operation so that either backend
produces bit-identical results; they exist so the package works without a
C toolchain, at interpreter speed.
"""

from __future__ import annotations

import math

INV_LN2 = 1.0 / math.log(2.0)


def _plogp(x):
    if x > 0.0:
        return x * math.log(x) * INV_LN2
    return 0.0


def _pick(cum, lo, hi, r):
    # First k in [lo, hi) with cum[k] > r; clamps to hi-1 for r at the top.
    a, b = lo, hi
    while a < b:
        mid = (a + b) >> 1
        if cum[mid] > r:
            b = mid
        else:
            a = mid + 1
    if a >= hi:
        a = hi - 1
    return a


def walk_chunk(indptr, indices, cumw, cum_pref, alpha, record_all, u, start, counts):
    """Advance the walker by u.shape[0] steps, tallying recorded arrivals."""
    nsteps = u.shape[0]
    npref = cum_pref.shape[0]
    cur = int(start)
    recorded = 0
    for s in range(nsteps):
        lo = indptr[cur]
        hi = indptr[cur + 1]
        via_link = False
        if lo == hi:
            target = _pick(cum_pref, 0, npref, u[s, 1])
        elif u[s, 0] < alpha:
            target = int(indices[_pick(cumw, lo, hi, u[s, 1])])
            via_link = True
        else:
            target = _pick(cum_pref, 0, npref, u[s, 1])
        if via_link or record_all:
            counts[target] += 1
            recorded += 1
        cur = target
    return cur, recorded


def move_sweep(order,
               out_indptr, out_indices, out_flow,
               in_indptr, in_indices, in_flow,
               node_flow, node_out, node_in,
               tele_t, tele_v, t_total,
               module,
               mod_flow, mod_exit, mod_enter, mod_t, mod_v, mod_size,
               free_ids, n_free,
               eps,
               cand, acc_out, acc_in, stamp, tag):
    """One randomized local-move sweep minimizing the two-level codelength."""
    moves = 0
    delta_sum = 0.0

    q = 0.0
    for m in range(mod_flow.shape[0]):
        q += mod_enter[m] + (t_total - mod_t[m]) * mod_v[m]

    for i in order:
        i = int(i)
        a = int(module[i])

        ncand = 0
        for e in range(out_indptr[i], out_indptr[i + 1]):
            m = int(module[out_indices[e]])
            if stamp[m] != tag:
                stamp[m] = tag
                acc_out[m] = 0.0
                acc_in[m] = 0.0
                cand[ncand] = m
                ncand += 1
            acc_out[m] += out_flow[e]
        for e in range(in_indptr[i], in_indptr[i + 1]):
            m = int(module[in_indices[e]])
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
                b = int(cand[ci])
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
            delta = (_plogp(q_new) - _plogp(q)
                     - (_plogp(enter_a_new) + _plogp(enter_b_new)
                        - _plogp(enter_a) - _plogp(enter_b))
                     - (_plogp(exit_a_new) + _plogp(exit_b_new)
                        - _plogp(exit_a) - _plogp(exit_b))
                     + (_plogp(exit_a_new + f_a_new) + _plogp(exit_b_new + f_b_new)
                        - _plogp(exit_a + mod_flow[a]) - _plogp(pmb_old)))
            if delta < best_delta:
                best_delta = delta
                best_b = b

        if best_b != a:
            b = best_b
            if b < 0:
                n_free -= 1
                b = int(free_ids[n_free])
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
