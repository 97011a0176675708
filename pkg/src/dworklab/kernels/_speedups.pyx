# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of dworklab.kernels._pure.

Coefficients are arbitrary precision Python ints, so the big-integer
multiplications still run in CPython's long arithmetic; Cython removes
the interpreter overhead of the O(N^2) recurrence loops, which dominates
for dense series.  Semantics are identical to the pure backend.
"""

BACKEND_NAME = "cython"


def vp_int(x, p):
    """Exponent of the largest power of the prime p dividing nonzero x."""
    cdef long v = 0
    cdef long chunk = 64
    if x == 0:
        raise ValueError("vp_int is undefined at 0")
    if p == 2:
        return (x & -x).bit_length() - 1
    pe = p ** chunk
    while True:
        q, r = divmod(x, pe)
        if r:
            break
        x = q
        v += chunk
    pe = p ** 8
    while True:
        q, r = divmod(x, pe)
        if r:
            break
        x = q
        v += 8
    while True:
        q, r = divmod(x, p)
        if r:
            break
        x = q
        v += 1
    return v


def hall_exp(s, nmax):
    """Integer coefficients h_0..h_nmax from integer s_1..s_nmax.

    Series with low-lying support take a sparse path that walks only the
    nonzero coefficients.
    """
    cdef Py_ssize_t n, k, j, kcap, prev, slen = len(s)
    cdef list h = [0] * (nmax + 1)
    h[0] = 1
    cdef list support = [k for k in range(1, slen) if s[k]]
    if support and support[len(support) - 1] * 4 <= nmax:
        for n in range(1, nmax + 1):
            acc = 0
            poch = 1
            prev = 1
            for k in support:
                if k > n:
                    break
                for j in range(n - k + 1, n - prev + 1):
                    poch = poch * j
                prev = k
                acc = acc + poch * s[k] * h[n - k]
            h[n] = acc
        return h
    for n in range(1, nmax + 1):
        acc = 0
        poch = 1
        kcap = n if n < slen - 1 else slen - 1
        for k in range(1, kcap + 1):
            sk = s[k]
            if sk:
                acc = acc + poch * sk * h[n - k]
            poch = poch * (n - k)
        h[n] = acc
    return h


def hall_exp_mod(s, nmax, modulus):
    """`hall_exp` with every value reduced modulo ``modulus``."""
    cdef Py_ssize_t n, k, j, kcap, prev, slen = len(s)
    if modulus <= 0:
        raise ValueError("modulus must be positive")
    cdef list h = [0] * (nmax + 1)
    h[0] = 1 % modulus
    cdef list sred = [x % modulus for x in s]
    cdef list support = [k for k in range(1, slen) if sred[k]]
    if support and support[len(support) - 1] * 4 <= nmax:
        for n in range(1, nmax + 1):
            acc = 0
            poch = 1
            prev = 1
            for k in support:
                if k > n:
                    break
                for j in range(n - k + 1, n - prev + 1):
                    poch = poch * j % modulus
                prev = k
                acc = acc + poch * sred[k] * h[n - k]
            h[n] = acc % modulus
        return h
    for n in range(1, nmax + 1):
        acc = 0
        poch = 1
        kcap = n if n < slen - 1 else slen - 1
        for k in range(1, kcap + 1):
            sk = sred[k]
            if sk:
                acc = acc + poch * sk * h[n - k]
            poch = poch * (n - k) % modulus
        h[n] = acc % modulus
    return h


def hall_log(h):
    """Invert `hall_exp`: recover integer s_1..s_N from integer h_0..h_N."""
    cdef Py_ssize_t n, k, nmax = len(h) - 1
    if nmax < 0 or h[0] != 1:
        raise ValueError("h_0 must be 1")
    cdef list s = [0] * (nmax + 1)
    for n in range(1, nmax + 1):
        acc = h[n]
        poch = 1
        for k in range(1, n):
            sk = s[k]
            if sk:
                acc = acc - poch * sk * h[n - k]
            poch = poch * (n - k)
        q, r = divmod(acc, poch)
        if r:
            raise ValueError(f"inverse transform not integral at n={n}")
        s[n] = q
    return s


def subgroup_lattice_sizes(order, p, add_flat):
    """Orders of all subgroups of an abelian p-group given its addition table.

    Same contract as the pure backend.  Subgroups are carried as 256-bit
    masks plus element lists in C buffers; the per-level dictionaries of
    mask bytes do the deduplication.
    """
    cdef const unsigned char* add = add_flat
    cdef int orderc = order, pc = p
    cdef int nbytes = (orderc + 7) >> 3
    cdef int g, e, cos, base, i, hl, kl, pg
    cdef unsigned char ptimes[256]
    cdef unsigned char seen[32]
    cdef unsigned char kmask[32]
    cdef unsigned char kelems[256]
    cdef const unsigned char* hmask
    cdef const unsigned char* helems
    if order > 256:
        raise ValueError("subgroup enumeration is capped at order 256")
    if len(add_flat) != orderc * orderc:
        raise ValueError("addition table has the wrong size")
    for g in range(orderc):
        e = 0
        for i in range(pc):
            e = add[e * orderc + g]
        ptimes[g] = <unsigned char> e

    sizes = [1]
    mask0 = bytes(bytearray([1]) + bytearray(nbytes - 1))
    level = {mask0: bytes([0])}
    while level:
        nxt = {}
        for mask_b, elems_b in level.items():
            hmask = mask_b
            helems = elems_b
            hl = len(<bytes> elems_b)
            for i in range(nbytes):
                seen[i] = hmask[i]
            for g in range(orderc):
                if (seen[g >> 3] >> (g & 7)) & 1:
                    continue
                pg = ptimes[g]
                if not ((hmask[pg >> 3] >> (pg & 7)) & 1):
                    continue
                for i in range(nbytes):
                    kmask[i] = hmask[i]
                for i in range(hl):
                    kelems[i] = helems[i]
                kl = hl
                cos = g
                while not ((hmask[cos >> 3] >> (cos & 7)) & 1):
                    base = cos * orderc
                    for i in range(hl):
                        e = add[base + helems[i]]
                        kmask[e >> 3] |= <unsigned char> (1 << (e & 7))
                        kelems[kl] = <unsigned char> e
                        kl += 1
                    cos = add[g * orderc + cos]
                for i in range(nbytes):
                    seen[i] |= kmask[i]
                kb = kmask[:nbytes]
                if kb not in nxt:
                    nxt[kb] = kelems[:kl]
        sizes.extend(len(<bytes> v) for v in nxt.values())
        level = nxt
    return sorted(sizes)


def log_residue_precision(nmax, p):
    """p-adic precision needed by `hall_log_mod_residues` up to nmax."""
    total = 0
    q = (nmax - 1) // p if nmax >= 1 else 0
    while q:
        total += q
        q //= p
    return total + 1


def hall_log_mod_residues(h, p, nmax):
    """Residues of s_n modulo p from h values known modulo p**C.

    See the pure backend for the precision argument.
    """
    cdef Py_ssize_t n, k
    cdef long v = 0, m
    C = log_residue_precision(nmax, p)
    modulus = p ** C
    if len(h) <= nmax or h[0] % modulus != 1 % modulus:
        raise ValueError("h must cover 0..nmax and have h_0 = 1")
    cdef list hred = [x % modulus for x in h[: nmax + 1]]
    cdef list s = [0] * (nmax + 1)
    cdef list residues = [0] * (nmax + 1)
    u = 1
    for n in range(1, nmax + 1):
        if n > 1:
            m = n - 1
            while m % p == 0:
                v += 1
                m //= p
            u = u * m % modulus
        acc = hred[n]
        poch = 1
        for k in range(1, n):
            sk = s[k]
            if sk:
                acc = acc - poch * sk * hred[n - k]
            poch = poch * (n - k) % modulus
        pv = p ** v
        acc = acc % modulus
        q, r = divmod(acc, pv)
        if r:
            raise ValueError(f"inverse transform not integral at n={n}")
        rest = p ** (C - v)
        sn = q * pow(u % rest, -1, rest) % rest
        s[n] = sn
        residues[n] = sn % p
    return residues
