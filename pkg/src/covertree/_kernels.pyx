# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot loops (random walk, local-time field, GFF).

Draw-for-draw mirror of ``_pykernels.py``: both backends consume the
underlying bit stream in the same order, so outputs are bit-identical for
equal seeds.  All loops release the GIL; callers hand each replica its own
BitGenerator, so replica-parallel threading scales.
"""

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport INFINITY, NAN
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    random_poisson,
    random_standard_exponential,
    random_standard_gamma,
    random_standard_normal,
    random_standard_uniform,
)

COMPILED = True

DEF GAMMA_CUTOFF = 32
DEF MAX_DEPTH = 62  # stack arrays below hold depth + 2 entries

cdef const char *CAPSULE_NAME = "BitGenerator"


cdef bitgen_t *_bg(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, CAPSULE_NAME):
        raise ValueError("expected a numpy BitGenerator")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, CAPSULE_NAME)


cdef inline double _poigamma(bitgen_t *bg, double r, double lam) noexcept nogil:
    cdef long n = random_poisson(bg, r)
    cdef double s = 0.0
    cdef long i
    if n == 0:
        return 0.0
    if n <= GAMMA_CUTOFF:
        for i in range(n):
            s += random_standard_exponential(bg)
    else:
        s = random_standard_gamma(bg, <double> n)
    return lam * s


def poigamma_draw(bit_generator, double r, double lam):
    """One PoiGamma(r, lam) variate from the given bit generator."""
    cdef bitgen_t *bg = _bg(bit_generator)
    cdef double out
    with bit_generator.lock:
        with nogil:
            out = _poigamma(bg, r, lam)
    return out


def walk_inverse_local_time(bit_generator, int depth, double t, bint collect_field):
    """Walk until the root's local time reaches t; see _pykernels for the contract."""
    cdef bitgen_t *bg = _bg(bit_generator)
    cdef long nv = (1 << (depth + 1)) - 1
    cdef long first_leaf = (1 << depth) - 1
    occ_arr = np.zeros(nv)
    vis_arr = np.zeros(nv, dtype=np.uint8)
    cdef double[::1] occ = occ_arr
    cdef unsigned char[::1] visited = vis_arr
    cdef long remaining = nv - 1
    cdef double target = 2.0 * t
    cdef long pos = 0, jumps = 0, k
    cdef double now = 0.0, h, cover_time = NAN
    cdef bint covered = False
    visited[0] = 1
    with bit_generator.lock:
        with nogil:
            while True:
                h = random_standard_exponential(bg)
                if pos == 0 and occ[0] + h >= target:
                    now += target - occ[0]
                    occ[0] = target
                    break
                occ[pos] += h
                now += h
                if pos >= first_leaf:
                    pos = (pos - 1) >> 1
                elif pos == 0:
                    pos = 1 + <long>(random_standard_uniform(bg) * 2.0)
                else:
                    k = <long>(random_standard_uniform(bg) * 3.0)
                    pos = (pos - 1) >> 1 if k == 0 else 2 * pos + k
                jumps += 1
                if not visited[pos]:
                    visited[pos] = 1
                    remaining -= 1
                    if remaining == 0:
                        cover_time = now
            covered = remaining == 0
    field = None
    if collect_field:
        field = occ_arr
        field[0] /= 2.0
        field[1:first_leaf] /= 3.0
    return now, cover_time, covered, jumps, field


def walk_cover(bit_generator, int depth):
    """Walk until every vertex has been visited; returns (cover_time, jumps)."""
    cdef bitgen_t *bg = _bg(bit_generator)
    cdef long nv = (1 << (depth + 1)) - 1
    cdef long first_leaf = (1 << depth) - 1
    vis_arr = np.zeros(nv, dtype=np.uint8)
    cdef unsigned char[::1] visited = vis_arr
    cdef long remaining = nv - 1
    cdef long pos = 0, jumps = 0, k
    cdef double now = 0.0
    visited[0] = 1
    with bit_generator.lock:
        with nogil:
            while remaining:
                now += random_standard_exponential(bg)
                if pos >= first_leaf:
                    pos = (pos - 1) >> 1
                elif pos == 0:
                    pos = 1 + <long>(random_standard_uniform(bg) * 2.0)
                else:
                    k = <long>(random_standard_uniform(bg) * 3.0)
                    pos = (pos - 1) >> 1 if k == 0 else 2 * pos + k
                jumps += 1
                if not visited[pos]:
                    visited[pos] = 1
                    remaining -= 1
    return now, jumps


def rk_field(bit_generator, int depth, double t, bint prune,
             out_values=None, level_min=None, level_sum=None):
    """Depth-first local-time field sample; see _pykernels for the contract."""
    if depth > MAX_DEPTH:
        raise ValueError(f"depth {depth} exceeds kernel limit {MAX_DEPTH}")
    cdef bitgen_t *bg = _bg(bit_generator)
    cdef double *outp = NULL
    cdef double *lminp = NULL
    cdef double *lsump = NULL
    cdef double[::1] out_mv, lmin_mv, lsum_mv
    cdef int i
    if out_values is not None:
        out_mv = out_values
        outp = &out_mv[0]
    if level_min is not None:
        lmin_mv = level_min
        lminp = &lmin_mv[0]
        for i in range(depth + 1):
            lminp[i] = INFINITY
    if level_sum is not None:
        lsum_mv = level_sum
        lsump = &lsum_mv[0]
        for i in range(depth + 1):
            lsump[i] = 0.0

    cdef int slev[MAX_DEPTH + 2]
    cdef long sidx[MAX_DEPTH + 2]
    cdef double sval[MAX_DEPTH + 2]
    cdef int sp = 0, lev
    cdef long idx
    cdef double val, left, right
    cdef double min_leaf = INFINITY
    cdef long zero_leaves = 0
    cdef bint zero_vertex = False

    slev[0] = 0
    sidx[0] = 0
    sval[0] = t
    sp = 1
    with bit_generator.lock:
        with nogil:
            while sp:
                sp -= 1
                lev = slev[sp]
                idx = sidx[sp]
                val = sval[sp]
                if outp != NULL:
                    outp[((<long> 1 << lev) - 1) + idx] = val
                if lminp != NULL and val < lminp[lev]:
                    lminp[lev] = val
                if lsump != NULL:
                    lsump[lev] += val
                if val == 0.0:
                    zero_vertex = True
                if lev == depth:
                    if val < min_leaf:
                        min_leaf = val
                    if val == 0.0:
                        zero_leaves += 1
                else:
                    if val == 0.0 and prune:
                        left = 0.0
                        right = 0.0
                    else:
                        left = _poigamma(bg, val, 1.0)
                        right = _poigamma(bg, val, 1.0)
                    slev[sp] = lev + 1
                    sidx[sp] = 2 * idx + 1
                    sval[sp] = right
                    sp += 1
                    slev[sp] = lev + 1
                    sidx[sp] = 2 * idx
                    sval[sp] = left
                    sp += 1
    return min_leaf, zero_leaves, zero_vertex


def gff_max(bit_generator, int depth, out_values=None):
    """Depth-first GFF sample; returns (max_all, max_leaf, argmax_level)."""
    if depth > MAX_DEPTH:
        raise ValueError(f"depth {depth} exceeds kernel limit {MAX_DEPTH}")
    cdef bitgen_t *bg = _bg(bit_generator)
    cdef double *outp = NULL
    cdef double[::1] out_mv
    if out_values is not None:
        out_mv = out_values
        outp = &out_mv[0]

    cdef int slev[MAX_DEPTH + 2]
    cdef long sidx[MAX_DEPTH + 2]
    cdef double sval[MAX_DEPTH + 2]
    cdef int sp = 0, lev, argmax_level = 0
    cdef long idx
    cdef double val, left, right
    cdef double max_all = -INFINITY, max_leaf = -INFINITY

    slev[0] = 0
    sidx[0] = 0
    sval[0] = 0.0
    sp = 1
    with bit_generator.lock:
        with nogil:
            while sp:
                sp -= 1
                lev = slev[sp]
                idx = sidx[sp]
                val = sval[sp]
                if outp != NULL:
                    outp[((<long> 1 << lev) - 1) + idx] = val
                if val > max_all:
                    max_all = val
                    argmax_level = lev
                if lev == depth:
                    if val > max_leaf:
                        max_leaf = val
                else:
                    left = val + random_standard_normal(bg)
                    right = val + random_standard_normal(bg)
                    slev[sp] = lev + 1
                    sidx[sp] = 2 * idx + 1
                    sval[sp] = right
                    sp += 1
                    slev[sp] = lev + 1
                    sidx[sp] = 2 * idx
                    sval[sp] = left
                    sp += 1
    return max_all, max_leaf, argmax_level
