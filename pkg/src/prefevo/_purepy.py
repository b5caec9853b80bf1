"""Pure-Python kernel for the adaptive-learning inner loop.

This module and ``_core.pyx`` are operation-for-operation twins: same
expressions, same evaluation order, same branch conditions. Given identical
inputs they must produce bit-identical doubles (the extension is compiled
without FMA contraction to keep that true). Change one file and you must make
the same textual change in the other; tests/test_backends.py enforces
equality on random inputs and whole trajectories.

Kind codes match the agent encoding: 0 = rational, 1 = behavioral.
Games enter as scalars (kappa/weight per game, at most two) because the
learning dynamic only ever runs one- or two-game environments.
"""

from __future__ import annotations

BACKEND_NAME = "python"

OK = 0
SINGULAR = 1
NO_PROGRESS = 2

_INF = float("inf")
_NAN = float("nan")

#: line-search floor: below this step size the ascent cannot improve within
#: double precision and the start is declared stationary
_STEP_FLOOR = 1e-12


def _game_payoffs(kind, alpha, a, okind, oalpha, ob, kap, m, pole_tol):
    """(u_own, u_other, ok) for one game; ok = 0 flags a singular pairing."""
    if kind == 1:
        ai = a
        if okind == 1:
            aj = ob
        else:
            aj = 0.5 * (m + kap * (1.0 + oalpha) * ai)
    else:
        if okind == 1:
            ai = 0.5 * (m + kap * (1.0 + alpha) * ob)
            aj = ob
        else:
            x = 1.0 + alpha
            y = 1.0 + oalpha
            den = 4.0 - kap * kap * x * y
            if abs(den) < pole_tol:
                return 0.0, 0.0, 0
            ai = m * (2.0 + kap * x) / den
            aj = m * (2.0 + kap * y) / den
    ui = ai * (kap * aj + m - ai)
    uj = aj * (kap * ai + m - aj)
    return ui, uj, 1


def _distinct(a0, a1, nk):
    if nk == 1:
        return 1
    if round(a0 * 1e9) == round(a1 * 1e9):
        return 1
    return 2


def pair_fitness(kind, alpha, a0, a1, okind, oalpha, ob0, ob1,
                 nk, k0, k1, p0, m, eps_r, eps_p, pole_tol):
    """Penalized fitness of (kind, alpha, a0, a1) against the opponent.

    NaN when any game's equilibrium is singular. Pass eps_r = eps_p = 0 for
    the raw material fitness.
    """
    u0, _, ok0 = _game_payoffs(kind, alpha, a0, okind, oalpha, ob0, k0, m, pole_tol)
    if ok0 == 0:
        return _NAN
    total = p0 * u0
    if nk == 2:
        u1, _, ok1 = _game_payoffs(kind, alpha, a1, okind, oalpha, ob1, k1, m, pole_tol)
        if ok1 == 0:
            return _NAN
        total = total + (1.0 - p0) * u1
    if kind == 1:
        cost = eps_p * _distinct(a0, a1, nk)
    else:
        cost = eps_r + eps_p
    return total - cost


def _leader_candidate(okind, oalpha, ob, kap, m, pole_tol):
    """Best committed action in one game: (ok, action, payoff).

    Against a committed opponent the objective is always concave; against a
    rational responder it is concave only while 2 - kap^2 (1+alpha) > 0.
    """
    if okind == 1:
        a = 0.5 * (m + kap * ob)
        u = a * (kap * ob + m - a)
        return 1, a, u
    den = 2.0 - kap * kap * (1.0 + oalpha)
    if den < pole_tol:
        return 0, 0.0, 0.0
    a = m * (2.0 + kap) / (2.0 * den)
    reply = 0.5 * (m + kap * (1.0 + oalpha) * a)
    u = a * (kap * reply + m - a)
    return 1, a, u


def _shared_value(okind, oalpha, ob, kap, m, a):
    """Payoff of committed action ``a`` in one game (opponent replies)."""
    if okind == 1:
        reply = ob
    else:
        reply = 0.5 * (m + kap * (1.0 + oalpha) * a)
    return a * (kap * reply + m - a)


def br_behavioral(okind, oalpha, ob0, ob1, nk, k0, k1, p0, m, eps_p, pole_tol):
    """Best behavioral reply: (status, action0, action1, penalized fitness).

    Evaluates the per-game-optimal (split) candidate and the best single
    shared action, returning whichever has higher penalized fitness; exact
    ties go to the shared action (fewer parameters).
    """
    ok0, c0, v0 = _leader_candidate(okind, oalpha, ob0, k0, m, pole_tol)
    if nk == 1:
        if ok0 == 0:
            return SINGULAR, 0.0, 0.0, -_INF
        return OK, c0, c0, p0 * v0 - eps_p

    ok1, c1, v1 = _leader_candidate(okind, oalpha, ob1, k1, m, pole_tol)

    have_split = ok0 == 1 and ok1 == 1
    fit_split = -_INF
    if have_split:
        fit_split = p0 * v0 + (1.0 - p0) * v1 - eps_p * _distinct(c0, c1, 2)

    # shared action: quadratic coefficients of the mixed leader objective
    if okind == 1:
        qa0 = -1.0
        qb0 = k0 * ob0 + m
        qa1 = -1.0
        qb1 = k1 * ob1 + m
    else:
        qa0 = k0 * k0 * (1.0 + oalpha) * 0.5 - 1.0
        qb0 = m + 0.5 * k0 * m
        qa1 = k1 * k1 * (1.0 + oalpha) * 0.5 - 1.0
        qb1 = m + 0.5 * k1 * m
    qa = p0 * qa0 + (1.0 - p0) * qa1
    qb = p0 * qb0 + (1.0 - p0) * qb1
    have_shared = qa < -pole_tol
    fit_shared = -_INF
    sh = 0.0
    if have_shared:
        sh = -qb / (2.0 * qa)
        fit_shared = (p0 * _shared_value(okind, oalpha, ob0, k0, m, sh)
                      + (1.0 - p0) * _shared_value(okind, oalpha, ob1, k1, m, sh)
                      - eps_p)

    if not have_split and not have_shared:
        return SINGULAR, 0.0, 0.0, -_INF
    if have_shared and fit_shared >= fit_split:
        return OK, sh, sh, fit_shared
    return OK, c0, c1, fit_split


def _rational_objective(al, okind, oalpha, ob0, ob1, nk, k0, k1, p0, m,
                        eps_r, eps_p, pole_tol):
    """Penalized fitness of Rational(al) against the opponent; -inf at poles."""
    if okind == 1:
        a = 0.5 * (m + k0 * (1.0 + al) * ob0)
        u0 = a * (k0 * ob0 + m - a)
    else:
        x = 1.0 + al
        y = 1.0 + oalpha
        den = 4.0 - k0 * k0 * x * y
        if abs(den) < pole_tol:
            return -_INF
        ai = m * (2.0 + k0 * x) / den
        aj = m * (2.0 + k0 * y) / den
        u0 = ai * (k0 * aj + m - ai)
    total = p0 * u0
    if nk == 2:
        if okind == 1:
            a = 0.5 * (m + k1 * (1.0 + al) * ob1)
            u1 = a * (k1 * ob1 + m - a)
        else:
            x = 1.0 + al
            y = 1.0 + oalpha
            den = 4.0 - k1 * k1 * x * y
            if abs(den) < pole_tol:
                return -_INF
            ai = m * (2.0 + k1 * x) / den
            aj = m * (2.0 + k1 * y) / den
            u1 = ai * (k1 * aj + m - ai)
        total = total + (1.0 - p0) * u1
    return total - (eps_r + eps_p)


def br_rational(okind, oalpha, ob0, ob1, nk, k0, k1, p0, m, eps_r, eps_p,
                pole_tol, step0, fd, gtol, maxit, extra, extra_alpha):
    """Best rational reply by multi-start finite-difference gradient ascent.

    Starts from {-1, -0.5, 0, 0.5, 1} plus the opponent's own preference when
    ``extra`` is set. Central differences with step ``fd``; ascent step
    ``step0`` with backtracking halving; stops a start when the gradient
    magnitude drops below ``gtol``, the line search stalls, or ``maxit``
    iterations pass. Returns (status, alpha, penalized fitness).
    """
    starts = [-1.0, -0.5, 0.0, 0.5, 1.0]
    if extra == 1:
        starts.append(extra_alpha)

    best_alpha = 0.0
    best_f = -_INF
    any_ok = 0
    for st in starts:
        a = st
        f = _rational_objective(a, okind, oalpha, ob0, ob1, nk, k0, k1, p0, m,
                                eps_r, eps_p, pole_tol)
        if f == -_INF:
            continue
        any_ok = 1
        for _ in range(maxit):
            fp = _rational_objective(a + fd, okind, oalpha, ob0, ob1, nk, k0,
                                     k1, p0, m, eps_r, eps_p, pole_tol)
            fm = _rational_objective(a - fd, okind, oalpha, ob0, ob1, nk, k0,
                                     k1, p0, m, eps_r, eps_p, pole_tol)
            if fp == -_INF or fm == -_INF:
                break
            grad = (fp - fm) / (2.0 * fd)
            if abs(grad) < gtol:
                break
            s = step0
            improved = 0
            while s >= _STEP_FLOOR:
                cand = a + s * grad
                fc = _rational_objective(cand, okind, oalpha, ob0, ob1, nk, k0,
                                         k1, p0, m, eps_r, eps_p, pole_tol)
                if fc > f:
                    a = cand
                    f = fc
                    improved = 1
                    break
                s = s * 0.5
            if improved == 0:
                break
        if f > best_f:
            best_f = f
            best_alpha = a
    if any_ok == 0:
        return NO_PROGRESS, 0.0, -_INF
    return OK, best_alpha, best_f


def step_round(alpha_in, act0_in, act1_in, kind_in,
               alpha_out, act0_out, act1_out, kind_out,
               mut_u, mut_alpha, mut_a0, mut_a1, mut_n, opp_raw,
               q_t, nk, k0, k1, p0, m, eps_r, eps_p, pole_tol,
               step0, fd, gtol, maxit, allow_b, allow_r):
    """One synchronous round update; fills the *_out arrays.

    Each agent independently either mutates (probability q_t, pre-drawn
    uniforms) or best-responds to a pre-drawn opponent's round-start strategy,
    installing the better of the behavioral/rational replies (ties within
    1e-12 go behavioral). Agents whose allowed replies all fail keep their
    strategy. Dormant fields (alpha of a behavioral agent, actions of a
    rational one) carry over unchanged.
    """
    # plain Python floats/ints: bit-identical values, much faster than
    # numpy scalar arithmetic
    alpha_in = [float(v) for v in alpha_in]
    act0_in = [float(v) for v in act0_in]
    act1_in = [float(v) for v in act1_in]
    kind_in = [int(v) for v in kind_in]
    mut_u = [float(v) for v in mut_u]
    mut_alpha = [float(v) for v in mut_alpha]
    mut_a0 = [float(v) for v in mut_a0]
    mut_a1 = [float(v) for v in mut_a1]
    mut_n = [int(v) for v in mut_n]
    opp_raw = [int(v) for v in opp_raw]

    n = len(kind_in)
    for i in range(n):
        if mut_u[i] < q_t:
            kind = mut_n[i]
            if allow_b == 0:
                kind = 0
            if allow_r == 0:
                kind = 1
            alpha_out[i] = mut_alpha[i]
            act0_out[i] = mut_a0[i]
            act1_out[i] = mut_a1[i]
            kind_out[i] = kind
            continue
        r = opp_raw[i]
        j = r + 1 if r >= i else r
        okind = kind_in[j]
        oalpha = alpha_in[j]
        ob0 = act0_in[j]
        ob1 = act1_in[j]

        fb = -_INF
        b0 = 0.0
        b1 = 0.0
        if allow_b == 1:
            sb, b0, b1, fb = br_behavioral(okind, oalpha, ob0, ob1, nk, k0, k1,
                                           p0, m, eps_p, pole_tol)
            if sb != OK:
                fb = -_INF
        fr = -_INF
        ral = 0.0
        if allow_r == 1:
            extra = 1 if okind == 0 else 0
            sr, ral, fr = br_rational(okind, oalpha, ob0, ob1, nk, k0, k1, p0,
                                      m, eps_r, eps_p, pole_tol, step0, fd,
                                      gtol, maxit, extra, oalpha)
            if sr != OK:
                fr = -_INF

        if fb == -_INF and fr == -_INF:
            alpha_out[i] = alpha_in[i]
            act0_out[i] = act0_in[i]
            act1_out[i] = act1_in[i]
            kind_out[i] = kind_in[i]
        elif fr - fb < 1e-12:
            alpha_out[i] = alpha_in[i]
            act0_out[i] = b0
            act1_out[i] = b1
            kind_out[i] = 1
        else:
            alpha_out[i] = ral
            act0_out[i] = act0_in[i]
            act1_out[i] = act1_in[i]
            kind_out[i] = 0
    return OK
