# cython: language_level=3
"""Compiled hot kernels: word merging with Koszul signs, sparse wedge
products and left derivatives.  Mirrors :mod:`fermifields._core_py`."""

BACKEND = "cython"


cpdef merge_words(tuple wa, tuple wb):
    """Merge two increasing words; return ``(sign, word)`` or ``None``."""
    cdef Py_ssize_t la = len(wa)
    cdef Py_ssize_t lb = len(wb)
    if lb == 0:
        return 1, wa
    if la == 0:
        return 1, wb
    cdef list out = []
    cdef Py_ssize_t i = 0, j = 0, crossings = 0
    cdef long a, b
    while i < la and j < lb:
        a = <long> wa[i]
        b = <long> wb[j]
        if a == b:
            return None
        if a < b:
            out.append(wa[i])
            i += 1
        else:
            out.append(wb[j])
            crossings += la - i
            j += 1
    while i < la:
        out.append(wa[i])
        i += 1
    while j < lb:
        out.append(wb[j])
        j += 1
    return (1 if crossings % 2 == 0 else -1), tuple(out)


cpdef dict wedge_terms(dict ta, dict tb):
    """Sparse product of two term dictionaries ``{word: coeff}``."""
    cdef dict out = {}
    cdef tuple wa, wb, w
    cdef object ca, cb, c, m
    cdef int sign
    for wa, ca in ta.items():
        for wb, cb in tb.items():
            m = merge_words(wa, wb)
            if m is None:
                continue
            sign = <int> (<tuple> m)[0]
            w = <tuple> (<tuple> m)[1]
            c = ca * cb
            if sign < 0:
                c = -c
            if w in out:
                out[w] = out[w] + c
            else:
                out[w] = c
    return out


cpdef dict contract(dict terms, long g):
    """Left derivative by generator ``g`` on a term dictionary."""
    cdef dict out = {}
    cdef tuple w, nw
    cdef object c
    cdef Py_ssize_t k, n, idx
    for w, c in terms.items():
        n = len(w)
        idx = -1
        for k in range(n):
            if <long> w[k] == g:
                idx = k
                break
        if idx < 0:
            continue
        nw = w[:idx] + w[idx + 1:]
        if idx % 2 == 1:
            c = -c
        if nw in out:
            out[nw] = out[nw] + c
        else:
            out[nw] = c
    return out
