# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend: C loops per path over the batch.

Draws flow through the numpy C distribution API on the Generator's own
bit stream (multinomial for iid offspring sums, ziggurat normals for the
diffusion steps), so the laws match the NumPy backend exactly.
"""

from libc.math cimport sqrt
from libc.stdint cimport int64_t
from libc.string cimport memset

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    binomial_t,
    random_multinomial,
    random_standard_normal,
)

cnp.import_array()

IS_COMPILED = True
NAME = "compiled"

cdef const char *_CAPSULE_NAME = "BitGenerator"


cdef bitgen_t *_bitgen(object rng) except NULL:
    capsule = rng.bit_generator.capsule
    if not PyCapsule_IsValid(capsule, _CAPSULE_NAME):
        raise ValueError("rng does not expose a BitGenerator capsule")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, _CAPSULE_NAME)


cdef inline double _next_double(bitgen_t *bg) noexcept nogil:
    return bg.next_double(bg.state)


cdef inline int _draw_cdf(bitgen_t *bg, double *cdf, int n) noexcept nogil:
    cdef double u = _next_double(bg)
    cdef int i = 0
    while i < n - 1 and u >= cdf[i]:
        i += 1
    return i


cdef inline int64_t _offspring_sum(
    bitgen_t *bg, int64_t n, double *pvals, int d,
    int64_t *buf, binomial_t *scratch,
) noexcept nogil:
    """Sum of n iid offspring draws via one multinomial.

    The buffer must be re-zeroed per call: random_multinomial leaves
    trailing entries untouched when the count is exhausted early.
    """
    cdef int i
    cdef int64_t s = 0
    if n <= 0:
        return 0
    memset(buf, 0, d * sizeof(int64_t))
    random_multinomial(bg, n, buf, pvals, d, scratch)
    for i in range(d):
        s += i * buf[i]
    return s


def _size_biased_cdf(p_star):
    h = np.arange(len(p_star)) * np.asarray(p_star, dtype=np.float64)
    cdf = np.cumsum(h / h.sum())
    cdf[-1] = 1.0
    return cdf


def step_sizes(sizes, p_star, rng):
    """One step of the level-size chain for a batch of sizes."""
    sizes_arr = np.ascontiguousarray(sizes, dtype=np.int64)
    if np.any(sizes_arr < 1):
        raise ValueError("level sizes must be >= 1")
    p_arr = np.ascontiguousarray(p_star, dtype=np.float64)
    out_arr = np.empty(len(sizes_arr), dtype=np.int64)
    hcdf_arr = _size_biased_cdf(p_arr)
    buf_arr = np.zeros(len(p_arr), dtype=np.int64)

    cdef cnp.int64_t[::1] ks = sizes_arr
    cdef cnp.int64_t[::1] out = out_arr
    cdef cnp.int64_t[::1] buf = buf_arr
    cdef double[::1] p = p_arr
    cdef double[::1] hcdf = hcdf_arr
    cdef int d = p.shape[0]
    cdef Py_ssize_t i, n_paths = ks.shape[0]
    cdef int64_t tot
    cdef binomial_t scratch
    memset(&scratch, 0, sizeof(scratch))
    cdef bitgen_t *bg = _bitgen(rng)

    with rng.bit_generator.lock:
        with nogil:
            for i in range(n_paths):
                tot = _draw_cdf(bg, &hcdf[0], d)
                tot = tot + _offspring_sum(bg, ks[i] - 1, &p[0], d, &buf[0], &scratch)
                out[i] = tot
    return out_arr


def step_groups(V, p_star, rng):
    """One chain step for batched per-group progeny counts (paths, r)."""
    v_arr = np.ascontiguousarray(V, dtype=np.int64)
    if v_arr.ndim != 2:
        raise ValueError("V must be a (paths, r) matrix")
    if np.any(v_arr.sum(axis=1) < 1):
        raise ValueError("total level size must be >= 1")
    p_arr = np.ascontiguousarray(p_star, dtype=np.float64)
    out_arr = np.empty_like(v_arr)
    hcdf_arr = _size_biased_cdf(p_arr)
    buf_arr = np.zeros(len(p_arr), dtype=np.int64)

    cdef cnp.int64_t[:, ::1] v = v_arr
    cdef cnp.int64_t[:, ::1] out = out_arr
    cdef cnp.int64_t[::1] buf = buf_arr
    cdef double[::1] p = p_arr
    cdef double[::1] hcdf = hcdf_arr
    cdef int d = p.shape[0]
    cdef Py_ssize_t i, n_paths = v.shape[0]
    cdef int j, r = v.shape[1], pick
    cdef int64_t k, nj
    cdef double u, cum
    cdef binomial_t scratch
    memset(&scratch, 0, sizeof(scratch))
    cdef bitgen_t *bg = _bitgen(rng)

    with rng.bit_generator.lock:
        with nogil:
            for i in range(n_paths):
                k = 0
                for j in range(r):
                    k += v[i, j]
                # special vertex's group, picked proportionally to V_j
                u = _next_double(bg) * k
                cum = 0.0
                pick = r - 1
                for j in range(r):
                    cum += v[i, j]
                    if u < cum:
                        pick = j
                        break
                for j in range(r):
                    nj = v[i, j] - (1 if j == pick else 0)
                    out[i, j] = _offspring_sum(bg, nj, &p[0], d, &buf[0], &scratch)
                out[i, pick] += _draw_cdf(bg, &hcdf[0], d)
    return out_arr


def euler_scalar(z, double mu, double dt, Py_ssize_t n_steps, rng):
    """Euler-Maruyama for dZ = mu dt + sqrt(mu max(Z,0)) dW, clipped at 0."""
    z_arr = np.array(z, dtype=np.float64, copy=True)
    cdef double[::1] zv = z_arr
    cdef Py_ssize_t i, s, n_paths = zv.shape[0]
    cdef double root_dt = sqrt(dt), drift = mu * dt, zi, pos
    cdef bitgen_t *bg = _bitgen(rng)

    with rng.bit_generator.lock:
        with nogil:
            for s in range(n_steps):
                for i in range(n_paths):
                    zi = zv[i]
                    pos = zi if zi > 0.0 else 0.0
                    zi = zi + drift + sqrt(mu * pos) * root_dt * random_standard_normal(bg)
                    zv[i] = zi if zi > 0.0 else 0.0
    return z_arr


def euler_groups(V, double mu, double dt, Py_ssize_t n_steps, rng):
    """Euler-Maruyama for dV_i = mu V_i/sum(V) dt + sqrt(mu max(V_i,0)) dW_i."""
    v_arr = np.array(V, dtype=np.float64, copy=True)
    if v_arr.ndim != 2:
        raise ValueError("V must be a (paths, r) matrix")
    cdef double[:, ::1] v = v_arr
    cdef Py_ssize_t i, s, n_paths = v.shape[0]
    cdef int j, r = v.shape[1]
    cdef double root_dt = sqrt(dt), total, share, vi, pos
    cdef bitgen_t *bg = _bitgen(rng)

    with rng.bit_generator.lock:
        with nogil:
            for s in range(n_steps):
                for i in range(n_paths):
                    total = 0.0
                    for j in range(r):
                        total += v[i, j]
                    for j in range(r):
                        vi = v[i, j]
                        share = vi / total if total > 0.0 else 1.0 / r
                        pos = vi if vi > 0.0 else 0.0
                        vi = vi + mu * share * dt + sqrt(mu * pos) * root_dt * random_standard_normal(bg)
                        v[i, j] = vi if vi > 0.0 else 0.0
    return v_arr
