# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Semantics mirror ``_fallback``; sums are Neumaier-compensated."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, pow, sqrt, fabs, M_PI

cnp.import_array()

ctypedef long long i64

cdef double[6] B2K = [1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730]
cdef double[6] FACT2K = [2.0, 24.0, 720.0, 40320.0, 3628800.0, 479001600.0]


cdef inline i64 _gcd(i64 a, i64 b) noexcept nogil:
    cdef i64 t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef inline i64 _inv(i64 x, i64 m) noexcept nogil:
    # extended Euclid; caller guarantees gcd(x, m) = 1
    cdef i64 r0 = m, r1 = x % m, t0 = 0, t1 = 1, qq, tmp
    if m == 1:
        return 0
    if r1 < 0:
        r1 += m
    while r1:
        qq = r0 // r1
        tmp = r0 - qq * r1
        r0 = r1
        r1 = tmp
        tmp = t0 - qq * t1
        t0 = t1
        t1 = tmp
    if t0 < 0:
        t0 += m
    return t0


cdef inline void _nsum(double* s, double* comp, double x) noexcept nogil:
    cdef double t = s[0] + x
    if fabs(s[0]) >= fabs(x):
        comp[0] += (s[0] - t) + x
    else:
        comp[0] += (x - t) + s[0]
    s[0] = t


cdef inline i64 _mulmod(i64 a, i64 b, i64 m) noexcept nogil:
    # a, b < m <= 2^40 would overflow i64 products; split b
    cdef i64 hi, lo
    cdef i64 lim = 3037000499
    if a < lim and b < lim:
        return (a * b) % m
    hi = b >> 20
    lo = b & ((1 << 20) - 1)
    return (((a * hi) % m) * (1 << 20) + a * lo) % m


def kloosterman(i64 m, i64 n, i64 c):
    cdef i64 x, num
    cdef double ang, sr = 0, cr = 0, si = 0, ci = 0
    if c == 1:
        return 1.0 + 0.0j
    m %= c
    n %= c
    if m < 0:
        m += c
    if n < 0:
        n += c
    with nogil:
        for x in range(1, c):
            if _gcd(x, c) != 1:
                continue
            num = (_mulmod(m, x, c) + _mulmod(n, _inv(x, c), c)) % c
            ang = 2.0 * M_PI * (<double> num) / (<double> c)
            _nsum(&sr, &cr, cos(ang))
            _nsum(&si, &ci, sin(ang))
    return complex(sr + cr, si + ci)


def ramanujan(i64 w, i64 k):
    cdef i64 b, kk
    cdef double s = 0, comp = 0
    if w == 1:
        return 1.0
    kk = k % w
    if kk < 0:
        kk += w
    with nogil:
        for b in range(1, w):
            if _gcd(b, w) == 1:
                _nsum(&s, &comp, cos(2.0 * M_PI * (<double> ((b * kk) % w)) / (<double> w)))
    return s + comp


def di_sum(cs, ds, ns, rs, ss, bs, gvals, i64 q):
    cdef const i64[::1] c_ = np.ascontiguousarray(cs, dtype=np.int64)
    cdef const i64[::1] d_ = np.ascontiguousarray(ds, dtype=np.int64)
    cdef const i64[::1] n_ = np.ascontiguousarray(ns, dtype=np.int64)
    cdef const i64[::1] r_ = np.ascontiguousarray(rs, dtype=np.int64)
    cdef const i64[::1] s_ = np.ascontiguousarray(ss, dtype=np.int64)
    cdef const double[::1] b_ = np.ascontiguousarray(bs, dtype=np.float64)
    cdef const double complex[:, :, ::1] g_ = np.ascontiguousarray(gvals, dtype=np.complex128)
    cdef Py_ssize_t nc = c_.shape[0], nd = d_.shape[0], nt = r_.shape[0]
    cdef Py_ssize_t i, j, a, b, t
    cdef i64 c, d, r, s, mod, inv, num
    cdef double ang, wr, wi, co, sn
    cdef double sr = 0, cr = 0, si = 0, ci = 0
    cdef double complex gv
    with nogil:
        for i in range(nc):
            c = c_[i]
            for j in range(nd):
                d = d_[j]
                a = 0
                while a < nt:
                    r = r_[a]
                    s = s_[a]
                    b = a + 1
                    while b < nt and r_[b] == r and s_[b] == s:
                        b += 1
                    mod = s * c
                    if _gcd(q * r * d, mod) == 1:
                        inv = _inv(_mulmod(r % mod, d % mod, mod), mod)
                        for t in range(a, b):
                            num = _mulmod(n_[t] % mod, inv, mod)
                            ang = 2.0 * M_PI * (<double> num) / (<double> mod)
                            co = cos(ang)
                            sn = sin(ang)
                            gv = g_[i, j, t]
                            wr = b_[t] * gv.real
                            wi = b_[t] * gv.imag
                            _nsum(&sr, &cr, wr * co - wi * sn)
                            _nsum(&si, &ci, wr * sn + wi * co)
                    a = b
    return complex(sr + cr, si + ci)


cdef int _em_cutoff() noexcept:
    cdef int N = 1
    cdef double poch = 1.0, term
    cdef int i
    # (1/2)_11
    for i in range(11):
        poch *= 0.5 + i
    while True:
        term = fabs(B2K[5]) / FACT2K[5] * poch * pow(<double> N, -11.5)
        if term < 1e-13:
            return N
        N += 1


def hurwitz_half(alphas):
    cdef const double[::1] a_ = np.ascontiguousarray(alphas, dtype=np.float64)
    out = np.empty(a_.shape[0], dtype=np.float64)
    cdef double[::1] o_ = out
    cdef Py_ssize_t i
    cdef int n, k, N = _em_cutoff()
    cdef double a, x, rx, acc, comp, poch, power, s = 0.5
    with nogil:
        for i in range(a_.shape[0]):
            a = a_[i]
            acc = 0
            comp = 0
            for n in range(N):
                _nsum(&acc, &comp, 1.0 / sqrt(n + a))
            x = N + a
            rx = sqrt(x)
            _nsum(&acc, &comp, -2.0 * rx)
            _nsum(&acc, &comp, 0.5 / rx)
            poch = s
            power = 1.0 / (x * rx)
            for k in range(1, 6):
                _nsum(&acc, &comp, B2K[k - 1] / FACT2K[k - 1] * poch * power)
                poch *= (s + 2 * k - 1) * (s + 2 * k)
                power /= x * x
            o_[i] = acc + comp
    return out


def afe_sum(values, weights, i64 kmax):
    cdef const double complex[::1] v_ = np.ascontiguousarray(values, dtype=np.complex128)
    cdef const double[::1] w_ = np.ascontiguousarray(weights, dtype=np.float64)
    cdef i64 q = v_.shape[0]
    cdef i64 m, n
    cdef double complex cm, cn
    cdef double sr = 0, cr = 0, si = 0, ci = 0, wt
    with nogil:
        for m in range(1, kmax + 1):
            cm = v_[m % q]
            if cm.real == 0 and cm.imag == 0:
                continue
            for n in range(1, kmax // m + 1):
                cn = v_[n % q]
                wt = w_[m * n]
                # cm * conj(cn) * wt
                _nsum(&sr, &cr, (cm.real * cn.real + cm.imag * cn.imag) * wt)
                _nsum(&si, &ci, (cm.imag * cn.real - cm.real * cn.imag) * wt)
    return complex(sr + cr, si + ci)
