# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: cdivision=True
"""Compiled kernel for the adaptive-learning inner loop.

Operation-for-operation twin of ``_purepy.py``; see that module's docstring
for the synchronization contract. Compiled with -ffp-contract=off so results
are bit-identical to the pure-Python backend.
"""

from libc.math cimport fabs, llrint, INFINITY, NAN

BACKEND_NAME = "compiled"

OK = 0
SINGULAR = 1
NO_PROGRESS = 2

cdef int _OK = 0
cdef int _SINGULAR = 1
cdef int _NO_PROGRESS = 2

cdef double _STEP_FLOOR = 1e-12


cdef struct GamePair:
    double ui
    double uj
    int ok


cdef struct Leader:
    int ok
    double a
    double u


cdef struct BRB:
    int status
    double a0
    double a1
    double fit


cdef struct BRR:
    int status
    double alpha
    double fit


cdef inline GamePair _game_payoffs(int kind, double alpha, double a,
                                   int okind, double oalpha, double ob,
                                   double kap, double m, double pole_tol):
    cdef GamePair out
    cdef double ai, aj, x, y, den
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
            if fabs(den) < pole_tol:
                out.ui = 0.0
                out.uj = 0.0
                out.ok = 0
                return out
            ai = m * (2.0 + kap * x) / den
            aj = m * (2.0 + kap * y) / den
    out.ui = ai * (kap * aj + m - ai)
    out.uj = aj * (kap * ai + m - aj)
    out.ok = 1
    return out


cdef inline int _distinct(double a0, double a1, int nk):
    if nk == 1:
        return 1
    if llrint(a0 * 1e9) == llrint(a1 * 1e9):
        return 1
    return 2


cdef double _pair_fitness_c(int kind, double alpha, double a0, double a1,
                            int okind, double oalpha, double ob0, double ob1,
                            int nk, double k0, double k1, double p0, double m,
                            double eps_r, double eps_p, double pole_tol):
    cdef GamePair g0, g1
    cdef double total, cost
    g0 = _game_payoffs(kind, alpha, a0, okind, oalpha, ob0, k0, m, pole_tol)
    if g0.ok == 0:
        return NAN
    total = p0 * g0.ui
    if nk == 2:
        g1 = _game_payoffs(kind, alpha, a1, okind, oalpha, ob1, k1, m, pole_tol)
        if g1.ok == 0:
            return NAN
        total = total + (1.0 - p0) * g1.ui
    if kind == 1:
        cost = eps_p * _distinct(a0, a1, nk)
    else:
        cost = eps_r + eps_p
    return total - cost


def pair_fitness(int kind, double alpha, double a0, double a1,
                 int okind, double oalpha, double ob0, double ob1,
                 int nk, double k0, double k1, double p0, double m,
                 double eps_r, double eps_p, double pole_tol):
    """Penalized fitness of (kind, alpha, a0, a1) against the opponent.

    NaN when any game's equilibrium is singular. Pass eps_r = eps_p = 0 for
    the raw material fitness.
    """
    return _pair_fitness_c(kind, alpha, a0, a1, okind, oalpha, ob0, ob1,
                           nk, k0, k1, p0, m, eps_r, eps_p, pole_tol)


cdef inline Leader _leader_candidate(int okind, double oalpha, double ob,
                                     double kap, double m, double pole_tol):
    cdef Leader out
    cdef double a, u, den, reply
    if okind == 1:
        a = 0.5 * (m + kap * ob)
        u = a * (kap * ob + m - a)
        out.ok = 1
        out.a = a
        out.u = u
        return out
    den = 2.0 - kap * kap * (1.0 + oalpha)
    if den < pole_tol:
        out.ok = 0
        out.a = 0.0
        out.u = 0.0
        return out
    a = m * (2.0 + kap) / (2.0 * den)
    reply = 0.5 * (m + kap * (1.0 + oalpha) * a)
    u = a * (kap * reply + m - a)
    out.ok = 1
    out.a = a
    out.u = u
    return out


cdef inline double _shared_value(int okind, double oalpha, double ob,
                                 double kap, double m, double a):
    cdef double reply
    if okind == 1:
        reply = ob
    else:
        reply = 0.5 * (m + kap * (1.0 + oalpha) * a)
    return a * (kap * reply + m - a)


cdef BRB _br_behavioral_c(int okind, double oalpha, double ob0, double ob1,
                          int nk, double k0, double k1, double p0, double m,
                          double eps_p, double pole_tol):
    cdef BRB out
    cdef Leader l0, l1
    cdef int have_split, have_shared
    cdef double fit_split, fit_shared, qa0, qb0, qa1, qb1, qa, qb, sh

    l0 = _leader_candidate(okind, oalpha, ob0, k0, m, pole_tol)
    if nk == 1:
        if l0.ok == 0:
            out.status = _SINGULAR
            out.a0 = 0.0
            out.a1 = 0.0
            out.fit = -INFINITY
            return out
        out.status = _OK
        out.a0 = l0.a
        out.a1 = l0.a
        out.fit = p0 * l0.u - eps_p
        return out

    l1 = _leader_candidate(okind, oalpha, ob1, k1, m, pole_tol)

    have_split = 1 if (l0.ok == 1 and l1.ok == 1) else 0
    fit_split = -INFINITY
    if have_split == 1:
        fit_split = p0 * l0.u + (1.0 - p0) * l1.u - eps_p * _distinct(l0.a, l1.a, 2)

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
    have_shared = 1 if qa < -pole_tol else 0
    fit_shared = -INFINITY
    sh = 0.0
    if have_shared == 1:
        sh = -qb / (2.0 * qa)
        fit_shared = (p0 * _shared_value(okind, oalpha, ob0, k0, m, sh)
                      + (1.0 - p0) * _shared_value(okind, oalpha, ob1, k1, m, sh)
                      - eps_p)

    if have_split == 0 and have_shared == 0:
        out.status = _SINGULAR
        out.a0 = 0.0
        out.a1 = 0.0
        out.fit = -INFINITY
        return out
    if have_shared == 1 and fit_shared >= fit_split:
        out.status = _OK
        out.a0 = sh
        out.a1 = sh
        out.fit = fit_shared
        return out
    out.status = _OK
    out.a0 = l0.a
    out.a1 = l1.a
    out.fit = fit_split
    return out


def br_behavioral(int okind, double oalpha, double ob0, double ob1,
                  int nk, double k0, double k1, double p0, double m,
                  double eps_p, double pole_tol):
    """Best behavioral reply: (status, action0, action1, penalized fitness)."""
    cdef BRB out = _br_behavioral_c(okind, oalpha, ob0, ob1, nk, k0, k1, p0,
                                    m, eps_p, pole_tol)
    return out.status, out.a0, out.a1, out.fit


cdef inline double _rational_objective(double al, int okind, double oalpha,
                                       double ob0, double ob1, int nk,
                                       double k0, double k1, double p0,
                                       double m, double eps_r, double eps_p,
                                       double pole_tol):
    cdef double a, u0, u1, x, y, den, ai, aj, total
    if okind == 1:
        a = 0.5 * (m + k0 * (1.0 + al) * ob0)
        u0 = a * (k0 * ob0 + m - a)
    else:
        x = 1.0 + al
        y = 1.0 + oalpha
        den = 4.0 - k0 * k0 * x * y
        if fabs(den) < pole_tol:
            return -INFINITY
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
            if fabs(den) < pole_tol:
                return -INFINITY
            ai = m * (2.0 + k1 * x) / den
            aj = m * (2.0 + k1 * y) / den
            u1 = ai * (k1 * aj + m - ai)
        total = total + (1.0 - p0) * u1
    return total - (eps_r + eps_p)


cdef BRR _br_rational_c(int okind, double oalpha, double ob0, double ob1,
                        int nk, double k0, double k1, double p0, double m,
                        double eps_r, double eps_p, double pole_tol,
                        double step0, double fd, double gtol, int maxit,
                        int extra, double extra_alpha):
    cdef BRR out
    cdef double starts[6]
    cdef int n_starts, si, it, improved, any_ok
    cdef double best_alpha, best_f, a, f, fp, fm, grad, s, cand, fc

    starts[0] = -1.0
    starts[1] = -0.5
    starts[2] = 0.0
    starts[3] = 0.5
    starts[4] = 1.0
    n_starts = 5
    if extra == 1:
        starts[5] = extra_alpha
        n_starts = 6

    best_alpha = 0.0
    best_f = -INFINITY
    any_ok = 0
    for si in range(n_starts):
        a = starts[si]
        f = _rational_objective(a, okind, oalpha, ob0, ob1, nk, k0, k1, p0, m,
                                eps_r, eps_p, pole_tol)
        if f == -INFINITY:
            continue
        any_ok = 1
        for it in range(maxit):
            fp = _rational_objective(a + fd, okind, oalpha, ob0, ob1, nk, k0,
                                     k1, p0, m, eps_r, eps_p, pole_tol)
            fm = _rational_objective(a - fd, okind, oalpha, ob0, ob1, nk, k0,
                                     k1, p0, m, eps_r, eps_p, pole_tol)
            if fp == -INFINITY or fm == -INFINITY:
                break
            grad = (fp - fm) / (2.0 * fd)
            if fabs(grad) < gtol:
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
        out.status = _NO_PROGRESS
        out.alpha = 0.0
        out.fit = -INFINITY
        return out
    out.status = _OK
    out.alpha = best_alpha
    out.fit = best_f
    return out


def br_rational(int okind, double oalpha, double ob0, double ob1,
                int nk, double k0, double k1, double p0, double m,
                double eps_r, double eps_p, double pole_tol,
                double step0, double fd, double gtol, int maxit,
                int extra, double extra_alpha):
    """Best rational reply by multi-start gradient ascent: (status, alpha, fitness)."""
    cdef BRR out = _br_rational_c(okind, oalpha, ob0, ob1, nk, k0, k1, p0, m,
                                  eps_r, eps_p, pole_tol, step0, fd, gtol,
                                  maxit, extra, extra_alpha)
    return out.status, out.alpha, out.fit


def step_round(double[::1] alpha_in, double[::1] act0_in, double[::1] act1_in,
               long long[::1] kind_in,
               double[::1] alpha_out, double[::1] act0_out,
               double[::1] act1_out, long long[::1] kind_out,
               double[::1] mut_u, double[::1] mut_alpha, double[::1] mut_a0,
               double[::1] mut_a1, long long[::1] mut_n, long long[::1] opp_raw,
               double q_t, int nk, double k0, double k1, double p0, double m,
               double eps_r, double eps_p, double pole_tol,
               double step0, double fd, double gtol, int maxit,
               int allow_b, int allow_r):
    """One synchronous round update; fills the *_out arrays."""
    cdef int n = kind_in.shape[0]
    cdef int i, j, okind, kind, extra
    cdef long long r
    cdef double oalpha, ob0, ob1, fb, fr, b0, b1, ral
    cdef BRB rb
    cdef BRR rr

    for i in range(n):
        if mut_u[i] < q_t:
            kind = <int> mut_n[i]
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
        j = <int> (r + 1 if r >= i else r)
        okind = <int> kind_in[j]
        oalpha = alpha_in[j]
        ob0 = act0_in[j]
        ob1 = act1_in[j]

        fb = -INFINITY
        b0 = 0.0
        b1 = 0.0
        if allow_b == 1:
            rb = _br_behavioral_c(okind, oalpha, ob0, ob1, nk, k0, k1, p0, m,
                                  eps_p, pole_tol)
            if rb.status == _OK:
                fb = rb.fit
                b0 = rb.a0
                b1 = rb.a1
        fr = -INFINITY
        ral = 0.0
        if allow_r == 1:
            extra = 1 if okind == 0 else 0
            rr = _br_rational_c(okind, oalpha, ob0, ob1, nk, k0, k1, p0, m,
                                eps_r, eps_p, pole_tol, step0, fd, gtol,
                                maxit, extra, oalpha)
            if rr.status == _OK:
                fr = rr.fit
                ral = rr.alpha

        if fb == -INFINITY and fr == -INFINITY:
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
