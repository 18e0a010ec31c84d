# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hashing and sketch kernels (see ``_kernels_py`` for the fallback)."""

from libc.stdlib cimport malloc, free

ctypedef unsigned long long u64

cdef u64 _FNV_OFFSET = 0xCBF29CE484222325ULL
cdef u64 _FNV_PRIME = 0x100000001B3ULL
cdef u64 _SEED_SALT = 0x243F6A8885A308D3ULL
cdef object _MASK64 = 0xFFFFFFFFFFFFFFFF


cdef inline u64 _mix64(u64 z) nogil:
    z = z + 0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline u64 _hash_bytes(const unsigned char* buf, Py_ssize_t n, u64 seedmix) nogil:
    cdef u64 h = _FNV_OFFSET
    cdef Py_ssize_t i
    for i in range(n):
        h = (h ^ buf[i]) * _FNV_PRIME
    return _mix64(h ^ seedmix)


cdef inline u64 _seedmix(object seed):
    cdef u64 s = <u64>(seed & _MASK64)
    return _mix64(s ^ _SEED_SALT)


def hash_user(str user, seed):
    cdef bytes raw = user.encode("utf-8")
    return _hash_bytes(<const unsigned char*>raw, len(raw), _seedmix(seed))


def hash_users(users, seed):
    cdef u64 sm = _seedmix(seed)
    cdef bytes raw
    out = []
    for u in users:
        raw = (<str>u).encode("utf-8")
        out.append(_hash_bytes(<const unsigned char*>raw, len(raw), sm))
    return out


def bottom_p(values, Py_ssize_t p):
    if p <= 0:
        return []
    cdef u64* buf = <u64*>malloc(p * sizeof(u64))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t n = 0, k
    cdef u64 v
    cdef bint dup
    try:
        for obj in values:
            v = <u64>obj
            if n == p and v >= buf[n - 1]:
                continue
            # insertion into the sorted buffer, skipping duplicates
            k = n - 1
            dup = False
            while k >= 0 and buf[k] >= v:
                if buf[k] == v:
                    dup = True
                    break
                k -= 1
            if dup:
                continue
            k += 1
            if n < p:
                n += 1
            for j in range(n - 1, k, -1):
                buf[j] = buf[j - 1]
            buf[k] = v
        return [buf[i] for i in range(n)]
    finally:
        free(buf)


def merge_bottom_p(list a, list b, Py_ssize_t p):
    cdef Py_ssize_t i = 0, j = 0, na = len(a), nb = len(b)
    cdef u64 x, y
    out = []
    while len(out) < p and (i < na or j < nb):
        if j >= nb:
            out.append(a[i]); i += 1
            continue
        if i >= na:
            out.append(b[j]); j += 1
            continue
        x = <u64>a[i]
        y = <u64>b[j]
        if x < y:
            out.append(a[i]); i += 1
        elif y < x:
            out.append(b[j]); j += 1
        else:
            out.append(a[i]); i += 1; j += 1
    return out


def sketches_intersect(list a, list b):
    cdef Py_ssize_t i = 0, j = 0, na = len(a), nb = len(b)
    cdef u64 x, y
    while i < na and j < nb:
        x = <u64>a[i]
        y = <u64>b[j]
        if x == y:
            return True
        if x < y:
            i += 1
        else:
            j += 1
    return False
