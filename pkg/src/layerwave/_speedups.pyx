# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled float-mode kernels for the lattice search and amplitude sums.

These mirror the pure-Python implementations operation for operation
(same accumulation order, same comparisons), so the enumeration output is
bit-identical and amplitude values agree to rounding of the binomial
coefficient product.
"""

from libc.stdlib cimport calloc, free

from layerwave.errors import GuardExceededError


cdef int _emit(long long* k, Py_ssize_t width, double t,
               list ks, list times, Py_ssize_t max_terms) except -1:
    cdef Py_ssize_t i
    if len(ks) >= max_terms:
        raise GuardExceededError(
            f"lattice enumeration exceeded {max_terms} terms")
    ks.append(tuple([k[i] for i in range(width)]))
    times.append(t)
    return 0


cdef int _descend(double* tau, long long* k, Py_ssize_t width, double bound,
                  int min_count, Py_ssize_t n, double t,
                  list ks, list times, Py_ssize_t max_terms) except -1:
    cdef double tt
    cdef long long c
    cdef Py_ssize_t i
    if n == width:
        _emit(k, width, t, ks, times, max_terms)
        return 0
    if k[n - 1] == 0:
        for i in range(n, width):
            k[i] = 0
        _emit(k, width, t, ks, times, max_terms)
        return 0
    c = min_count
    while True:
        tt = t + c * tau[n]
        if tt > bound:
            break
        k[n] = c
        _descend(tau, k, width, bound, min_count, n + 1, tt,
                 ks, times, max_terms)
        c += 1
    k[n] = 0
    return 0


def enumerate_lattice(list tau, double bound, int min_count,
                      Py_ssize_t max_terms):
    cdef Py_ssize_t width = len(tau)
    cdef Py_ssize_t i
    cdef double t0
    cdef list ks = []
    cdef list times = []
    cdef double* ctau = <double*> calloc(width, sizeof(double))
    cdef long long* k = <long long*> calloc(width, sizeof(long long))
    if ctau == NULL or k == NULL:
        free(ctau)
        free(k)
        raise MemoryError()
    try:
        for i in range(width):
            ctau[i] = tau[i]
        k[0] = 1
        t0 = 1 * ctau[0]
        if t0 <= bound:
            if width == 1:
                _emit(k, width, t0, ks, times, max_terms)
            else:
                _descend(ctau, k, width, bound, min_count, 1, t0,
                         ks, times, max_terms)
    finally:
        free(ctau)
        free(k)
    return ks, times


cdef double _comb_d(long long n, long long r):
    if r < 0 or r > n:
        return 0.0
    if r > n - r:
        r = n - r
    cdef double acc = 1.0
    cdef long long i
    for i in range(1, r + 1):
        acc = acc * (n - r + i) / i
    return acc


def eval_amplitudes(list refl, list ks):
    """Sum the signed branch-count box for each transit count vector."""
    cdef Py_ssize_t width = len(refl)
    cdef Py_ssize_t nks = len(ks)
    cdef Py_ssize_t idx, n, j
    cdef long long gmax = 1
    cdef tuple kt_py
    cdef long long v

    for idx in range(nks):
        kt_py = ks[idx]
        for n in range(width):
            v = kt_py[n]
            if 2 * v > gmax:
                gmax = 2 * v

    cdef Py_ssize_t stride = gmax + 1
    cdef double* xpow = <double*> calloc(width * stride, sizeof(double))
    cdef double* qpow = <double*> calloc(width * stride, sizeof(double))
    cdef long long* k = <long long*> calloc(width, sizeof(long long))
    cdef long long* kt = <long long*> calloc(width, sizeof(long long))
    cdef long long* u = <long long*> calloc(width, sizeof(long long))
    cdef long long* hi = <long long*> calloc(width, sizeof(long long))
    cdef long long* b = <long long*> calloc(width, sizeof(long long))
    if (xpow == NULL or qpow == NULL or k == NULL or kt == NULL or
            u == NULL or hi == NULL or b == NULL):
        free(xpow); free(qpow); free(k); free(kt); free(u); free(hi); free(b)
        raise MemoryError()

    cdef double x, q, coeff, xf, qf, total
    cdef long long parity, xe
    cdef Py_ssize_t pos
    cdef list out = []
    try:
        for n in range(width):
            x = refl[n]
            q = 1.0 - x * x
            xpow[n * stride] = 1.0
            qpow[n * stride] = 1.0
            for j in range(1, stride):
                xpow[n * stride + j] = xpow[n * stride + j - 1] * x
                qpow[n * stride + j] = qpow[n * stride + j - 1] * q

        for idx in range(nks):
            kt_py = ks[idx]
            for n in range(width):
                k[n] = kt_py[n]
            for n in range(width - 1):
                kt[n] = k[n + 1]
            kt[width - 1] = 0
            for n in range(width):
                u[n] = 1 if kt[n] >= 1 else 0
                hi[n] = k[n] if k[n] < kt[n] else kt[n]
                b[n] = u[n]

            total = 0.0
            while True:
                coeff = 1.0
                parity = 0
                for n in range(width):
                    coeff *= _comb_d(k[n], b[n])
                for n in range(width):
                    coeff *= _comb_d(kt[n] - u[n], b[n] - u[n])
                    parity += kt[n] - b[n]
                xf = 1.0
                qf = 1.0
                for n in range(width):
                    xe = (kt[n] - b[n]) + (k[n] - b[n])
                    xf *= xpow[n * stride + xe]
                    qf *= qpow[n * stride + b[n]]
                if parity & 1:
                    total += -coeff * xf * qf
                else:
                    total += coeff * xf * qf

                pos = width - 1
                while pos >= 0:
                    b[pos] += 1
                    if b[pos] <= hi[pos]:
                        break
                    b[pos] = u[pos]
                    pos -= 1
                if pos < 0:
                    break
            out.append(total)
    finally:
        free(xpow); free(qpow); free(k); free(kt); free(u); free(hi); free(b)
    return out
