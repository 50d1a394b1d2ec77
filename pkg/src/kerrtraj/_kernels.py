"""Compiled inner loops for the trajectory integrators.

Both kernels advance one trajectory over a block of pre-drawn random
numbers and write sampled state vectors into caller-provided buffers.
All randomness is generated outside (counter-based Philox streams), so
the kernels are pure deterministic functions of their inputs.  No
fastmath: results must be bit-reproducible.
"""

import numpy as np
from numba import njit

__all__ = ["counting_block", "homodyne_block"]


@njit(cache=True)
def counting_block(psi, prop, jops, u, k0, dt, p_max, sample_steps, s_start, samples, ev_steps, ev_ch):
    """Jump/no-jump stepping over ``len(u)`` steps starting after global step k0.

    psi           state at step k0 (unit norm), updated in place
    prop          precomputed one-step no-jump propagator (RK4 polynomial)
    jops          (n_ch, D, D) jump operators
    u             one uniform variate per step
    p_max         cap on the per-step total jump probability
    sample_steps  sorted global step indices at which to store the state
    samples       (n_samples, D) output buffer
    ev_steps/ev_ch  per-block event buffers (global step index, channel)

    Returns (next sample slot, number of events, error code, error step);
    error 2 means the total jump probability exceeded ``p_max``.
    """
    D = psi.shape[0]
    n_ch = jops.shape[0]
    phi = np.empty((n_ch, D), dtype=np.complex128)
    e = np.empty(n_ch, dtype=np.float64)
    new = np.empty(D, dtype=np.complex128)
    s_idx = s_start
    n_samp = sample_steps.shape[0]
    n_ev = 0
    err = 0
    err_step = -1

    for i in range(u.shape[0]):
        k_next = k0 + i + 1
        # channel weights e_c = <J_c^dag J_c> from the pre-step state
        tot = 0.0
        for c in range(n_ch):
            acc = 0.0
            for r in range(D):
                z = 0.0 + 0.0j
                for q in range(D):
                    z += jops[c, r, q] * psi[q]
                phi[c, r] = z
                acc += z.real * z.real + z.imag * z.imag
            e[c] = acc
            tot += acc
        if tot * dt > p_max:
            err = 2
            err_step = k_next
            break

        if u[i] < tot * dt:
            # detection: project with the jump operator of the selected channel
            c_sel = n_ch - 1
            cum = 0.0
            for c in range(n_ch):
                cum += e[c] * dt
                if u[i] < cum:
                    c_sel = c
                    break
            nrm = np.sqrt(e[c_sel])
            for r in range(D):
                psi[r] = phi[c_sel, r] / nrm
            ev_steps[n_ev] = k_next
            ev_ch[n_ev] = c_sel
            n_ev += 1
        else:
            # no detection: one deterministic non-Hermitian step, renormalized
            nrm = 0.0
            for r in range(D):
                z = 0.0 + 0.0j
                for q in range(D):
                    z += prop[r, q] * psi[q]
                new[r] = z
                nrm += z.real * z.real + z.imag * z.imag
            nrm = np.sqrt(nrm)
            for r in range(D):
                psi[r] = new[r] / nrm

        if s_idx < n_samp and sample_steps[s_idx] == k_next:
            for r in range(D):
                samples[s_idx, r] = psi[r]
            s_idx += 1

    return s_idx, n_ev, err, err_step


@njit(cache=True)
def homodyne_block(psi, A_dt, jops, dW, k0, dt, sample_steps, s_start, samples, cur_samples, cur_acc, last_sample_step, drift_max, drift_sum):
    """Euler-Maruyama stepping over ``dW.shape[0]`` steps starting after step k0.

    psi           state at step k0 (unit norm), updated in place
    A_dt          (-iH - sum_c J_c^dag J_c / 2) * dt, precomputed
    jops          (n_ch, D, D) jump operators
    dW            (n_steps, n_ch) Wiener increments (variance dt)
    cur_acc       (n_ch,) running signal integral of the current sampling bin
    cur_samples   (n_samples, n_ch) bin-averaged homodyne currents

    Returns (next sample slot, error code, error step, drift_max, drift_sum,
    last sample step); error 1 means the state became non-finite.
    """
    D = psi.shape[0]
    n_ch = jops.shape[0]
    phi = np.empty((n_ch, D), dtype=np.complex128)
    m = np.empty(n_ch, dtype=np.float64)
    dpsi = np.empty(D, dtype=np.complex128)
    s_idx = s_start
    n_samp = sample_steps.shape[0]
    err = 0
    err_step = -1
    last_k = last_sample_step

    for i in range(dW.shape[0]):
        k_next = k0 + i + 1
        # phi_c = J_c psi and homodyne signals m_c = <J_c + J_c^dag>
        for c in range(n_ch):
            mm = 0.0
            for r in range(D):
                z = 0.0 + 0.0j
                for q in range(D):
                    z += jops[c, r, q] * psi[q]
                phi[c, r] = z
                mm += psi[r].real * z.real + psi[r].imag * z.imag
            m[c] = 2.0 * mm
        for r in range(D):
            z = 0.0 + 0.0j
            for q in range(D):
                z += A_dt[r, q] * psi[q]
            dpsi[r] = z
        for c in range(n_ch):
            w = dW[i, c]
            f_phi = w + 0.5 * m[c] * dt
            f_psi = -0.5 * m[c] * w - 0.125 * m[c] * m[c] * dt
            for r in range(D):
                dpsi[r] += phi[c, r] * f_phi + psi[r] * f_psi
            cur_acc[c] += m[c] * dt + w

        nrm = 0.0
        for r in range(D):
            psi[r] = psi[r] + dpsi[r]
            nrm += psi[r].real * psi[r].real + psi[r].imag * psi[r].imag
        nrm = np.sqrt(nrm)
        if not np.isfinite(nrm) or nrm == 0.0:
            err = 1
            err_step = k_next
            break
        dev = abs(nrm - 1.0)
        drift_sum += dev
        if dev > drift_max:
            drift_max = dev
        for r in range(D):
            psi[r] /= nrm

        if s_idx < n_samp and sample_steps[s_idx] == k_next:
            bin_steps = k_next - last_k
            for c in range(n_ch):
                cur_samples[s_idx, c] = cur_acc[c] / (bin_steps * dt)
                cur_acc[c] = 0.0
            for r in range(D):
                samples[s_idx, r] = psi[r]
            last_k = k_next
            s_idx += 1

    return s_idx, err, err_step, drift_max, drift_sum, last_k
