"""Compiled kernels: word collection and table-driven arithmetic.

Exponent vectors are int64 arrays indexed from 0 (the most central
generator).  Relation words are stored as (generator, exponent) letter
tables: ``pw_*`` for p-th powers, ``cm_*[j, i]`` for the commutator
[a_j, a_i] with j > i, ``iv_*`` for generator inverses.

The table kernels work on element codes sum(e_i p^i), so the subgroup
N_j = <a_1..a_j> is exactly the code range [0, p^j).  ``R[k, x]`` is the
code of x * a_k and ``Ri`` holds the inverse permutations.
"""

import numpy as np
from numba import njit

STACK_SIZE = 1 << 15


@njit(cache=True)
def _push(sg, se, sp, g, e):
    if sp >= sg.shape[0]:
        raise RuntimeError("collection stack overflow")
    sg[sp] = g
    se[sp] = e
    return sp + 1


@njit(cache=True)
def _push_word(sg, se, sp, wg, we, wn):
    # last letter first, so the word is consumed left to right
    for t in range(wn - 1, -1, -1):
        sp = _push(sg, se, sp, wg[t], we[t])
    return sp


@njit(cache=True)
def run_stack(r, sg, se, sp, p, pw_g, pw_e, pw_n, cm_g, cm_e, cm_n, jmax):
    """Multiply the normal form ``r`` (in place) by the letters on the stack."""
    n = r.shape[0]
    while sp > 0:
        sp -= 1
        g = sg[sp]
        e = se[sp]
        blocked = False
        for j in range(g + 1, jmax[g] + 1):
            if r[j] != 0 and cm_n[j, g] > 0:
                blocked = True
                break
        if not blocked:
            t = r[g] + e
            if t < p:
                r[g] = t
                continue
            # a_g^p = w is inserted below the tail: H w a_g^(t-p) T
            for j in range(n - 1, g, -1):
                if r[j] != 0:
                    sp = _push(sg, se, sp, j, r[j])
                    r[j] = 0
            if t - p > 0:
                sp = _push(sg, se, sp, g, t - p)
            r[g] = 0
            sp = _push_word(sg, se, sp, pw_g[g], pw_e[g], pw_n[g])
            continue
        # T a_g = a_g T^(a_g), one copy of a_g at a time
        if e > 1:
            sp = _push(sg, se, sp, g, e - 1)
        for j in range(n - 1, g, -1):
            c = r[j]
            if c == 0:
                continue
            r[j] = 0
            if cm_n[j, g] == 0:
                sp = _push(sg, se, sp, j, c)
            else:
                for _ in range(c):
                    sp = _push_word(sg, se, sp, cm_g[j, g], cm_e[j, g], cm_n[j, g])
                    sp = _push(sg, se, sp, j, 1)
        t = r[g] + 1
        if t < p:
            r[g] = t
        else:
            r[g] = 0
            sp = _push_word(sg, se, sp, pw_g[g], pw_e[g], pw_n[g])
    return sp


@njit(cache=True)
def collect_letters(gens, exps, p, n, pw_g, pw_e, pw_n, cm_g, cm_e, cm_n, jmax):
    """Normal form of a word given as letters with positive exponents."""
    r = np.zeros(n, np.int64)
    sg = np.empty(STACK_SIZE, np.int64)
    se = np.empty(STACK_SIZE, np.int64)
    sp = 0
    for t in range(gens.shape[0] - 1, -1, -1):
        sp = _push(sg, se, sp, gens[t], exps[t])
    run_stack(r, sg, se, sp, p, pw_g, pw_e, pw_n, cm_g, cm_e, cm_n, jmax)
    return r



@njit(cache=True)
def _mulcode(R, c, d, p, n):
    """c * d for codes c, d."""
    for i in range(n):
        e = d % p
        d //= p
        for _ in range(e):
            c = R[i, c]
    return c


@njit(cache=True)
def _vec_code(v, p):
    c = 0
    for i in range(v.shape[0] - 1, -1, -1):
        c = c * p + v[i]
    return c


@njit(cache=True)
def _psi(R, psi, q, p, n):
    """Image of the code q under the automorphism whose generator images are psi."""
    c = 0
    for l in range(n):
        e = q % p
        q //= p
        for _ in range(e):
            c = _mulcode(R, c, psi[l], p, n)
    return c


@njit(cache=True)
def build_tables(p, powers, comms):
    """Right-multiplication tables of a consistent presentation.

    ``powers[i]`` is a_i^p and ``comms[j, i]`` is [a_j, a_i] (j > i), both as
    exponent vectors.  Level j fills x * a_k for every x in N_{j+1} outside N_j,
    using only the part of the tables already built for N_j.
    """
    n = powers.shape[0]
    P = np.empty(n + 1, np.int64)
    P[0] = 1
    for i in range(n):
        P[i + 1] = P[i] * p
    R = np.empty((n, P[n]), np.int32)
    for k in range(n):
        for x in range(P[k]):
            R[k, x] = x + P[k]
    psi = np.zeros(n, np.int64)
    u = np.zeros(p, np.int64)
    for j in range(n):
        # psi(v) = a_j v a_j^-1 on N_j; psi(a_i) = a_i psi([a_j, a_i])
        for i in range(j):
            c = _psi(R, psi, _vec_code(comms[j, i], p), p, n)
            psi[i] = _mulcode(R, P[i], c, p, n)
        for k in range(j):
            # a_k^-1 a_j^e a_k = u[e] a_j^e
            u1 = _psi(R, psi, _vec_code(comms[j, k], p), p, n)
            u[1] = u1
            q = u1
            for e in range(2, p):
                q = _psi(R, psi, q, p, n)
                u[e] = _mulcode(R, u[e - 1], q, p, n)
            for y in range(P[j]):
                base = R[k, y]
                for e in range(1, p):
                    R[k, y + e * P[j]] = _mulcode(R, base, u[e], p, n) + e * P[j]
        w = _vec_code(powers[j], p)
        for y in range(P[j]):
            for e in range(1, p - 1):
                R[j, y + e * P[j]] = y + (e + 1) * P[j]
            R[j, y + (p - 1) * P[j]] = _mulcode(R, y, w, p, n)
    Ri = np.empty_like(R)
    for k in range(n):
        for x in range(P[n]):
            Ri[k, R[k, x]] = x
    return R, Ri


@njit(cache=True)
def _invcode(Ri, c, p, n):
    # (a_1^e_1 ... a_n^e_n)^-1 = a_n^-e_n ... a_1^-e_1
    out = 0
    digits = np.empty(n, np.int64)
    for i in range(n):
        digits[i] = c % p
        c //= p
    for i in range(n - 1, -1, -1):
        for _ in range(digits[i]):
            out = Ri[i, out]
    return out


@njit(cache=True)
def _powcode(R, c, k, p, n):
    out = 0
    while k > 0:
        if k & 1:
            out = _mulcode(R, out, c, p, n)
        k >>= 1
        if k > 0:
            c = _mulcode(R, c, c, p, n)
    return out


@njit(cache=True)
def t_mul(R, A, B, p, n):
    m = max(A.shape[0], B.shape[0])
    out = np.empty(m, np.int64)
    for r in range(m):
        a = A[r if A.shape[0] > 1 else 0]
        b = B[r if B.shape[0] > 1 else 0]
        out[r] = _mulcode(R, a, b, p, n)
    return out


@njit(cache=True)
def t_inv(Ri, A, p, n):
    out = np.empty(A.shape[0], np.int64)
    for r in range(A.shape[0]):
        out[r] = _invcode(Ri, A[r], p, n)
    return out


@njit(cache=True)
def t_pow(R, A, k, p, n):
    out = np.empty(A.shape[0], np.int64)
    for r in range(A.shape[0]):
        out[r] = _powcode(R, A[r], k, p, n)
    return out


@njit(cache=True)
def t_conj(R, A, g, ginv, p, n):
    """Codes of g^-1 a g."""
    out = np.empty(A.shape[0], np.int64)
    for r in range(A.shape[0]):
        out[r] = _mulcode(R, _mulcode(R, ginv, A[r], p, n), g, p, n)
    return out


@njit(cache=True)
def t_comm(R, Ri, A, B, p, n):
    """Codes of [a, b] = a^-1 b^-1 a b."""
    m = max(A.shape[0], B.shape[0])
    out = np.empty(m, np.int64)
    for r in range(m):
        a = A[r if A.shape[0] > 1 else 0]
        b = B[r if B.shape[0] > 1 else 0]
        c = _mulcode(R, _invcode(Ri, a, p, n), _invcode(Ri, b, p, n), p, n)
        out[r] = _mulcode(R, _mulcode(R, c, a, p, n), b, p, n)
    return out
