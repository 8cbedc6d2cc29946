# cython: language_level=3
"""Compiled kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp

from ._pykernels import CapExceeded

cnp.import_array()


cdef inline Py_ssize_t _neighbour(Py_ssize_t idx, const long long[:] step,
                                  const long long[:] extents, const long long[:] strides,
                                  const unsigned char[:] wrap, Py_ssize_t ncoords) noexcept nogil:
    cdef Py_ssize_t i, nidx = 0
    cdef long long rem = idx, c, e
    for i in range(ncoords):
        c = rem // strides[i]
        rem = rem - c * strides[i]
        c = c + step[i]
        e = extents[i]
        if wrap[i]:
            c = c % e
            if c < 0:
                c += e
        elif c < 0 or c >= e:
            return -1
        nidx += c * strides[i]
    return nidx


def _strides(extents):
    strides = [1] * len(extents)
    for i in range(len(extents) - 2, -1, -1):
        strides[i] = strides[i + 1] * extents[i + 1]
    return strides


def bfs_ball(extents, shift, wrap, steps, long long radius, trans, int start_state,
             long long max_elements):
    cdef Py_ssize_t ncoords = len(extents)
    cdef long long[:] ext_v = np.asarray(extents, dtype=np.int64).reshape(-1)
    cdef long long[:] str_v = np.asarray(_strides(list(extents)), dtype=np.int64).reshape(-1)
    cdef unsigned char[:] wrap_v = np.asarray(wrap, dtype=np.uint8).reshape(-1)
    cdef long long[:, :] steps_v = np.asarray(steps, dtype=np.int64).reshape(len(steps), ncoords)
    cdef Py_ssize_t nletters = steps_v.shape[0]
    cdef long long size = 1
    for e in extents:
        size *= e

    dist_a = np.full(size, -1, dtype=np.int32)
    last_a = np.full(size, -1, dtype=np.int8)
    cdef int[:] dist = dist_a
    cdef signed char[:] last = last_a
    cdef bint track = trans is not None
    cdef const int[:, :] trans_v
    cdef int[:] state
    state_a = None
    if track:
        trans_v = np.ascontiguousarray(trans, dtype=np.int32).reshape(-1, nletters)
        state_a = np.full(size, -1, dtype=np.int32)
        state = state_a

    cdef long long cap = min(size, max_elements)
    order_a = np.empty(cap, dtype=np.int64)
    cdef long long[:] order = order_a
    layer_ends = [1]

    cdef long long origin = 0
    cdef Py_ssize_t i
    for i in range(ncoords):
        origin += shift[i] * str_v[i]
    dist[origin] = 0
    order[0] = origin
    if track:
        state[origin] = start_state

    cdef long long head = 0, tail = 1, end, idx, nidx
    cdef int level, st
    cdef Py_ssize_t x
    cdef bint overflow = False
    for level in range(radius):
        end = tail
        with nogil:
            while head < end:
                idx = order[head]
                head += 1
                st = state[idx] if track else -1
                for x in range(nletters):
                    nidx = _neighbour(idx, steps_v[x], ext_v, str_v, wrap_v, ncoords)
                    if nidx < 0 or dist[nidx] >= 0:
                        continue
                    if tail >= cap:
                        overflow = True
                        break
                    dist[nidx] = level + 1
                    last[nidx] = <signed char>x
                    if track:
                        state[nidx] = trans_v[st, x] if st >= 0 else -1
                    order[tail] = nidx
                    tail += 1
                if overflow:
                    break
        if overflow:
            raise CapExceeded(f"ball exceeds {max_elements} elements")
        layer_ends.append(tail)
    return dist_a, last_a, state_a, order_a[:tail].copy(), np.asarray(layer_ends, dtype=np.int64)


def max_offset_distance(dist_in, extents, shift, wrap, order_in, offsets):
    cdef Py_ssize_t ncoords = len(extents)
    cdef long long[:] ext_v = np.asarray(extents, dtype=np.int64).reshape(-1)
    cdef long long[:] str_v = np.asarray(_strides(list(extents)), dtype=np.int64).reshape(-1)
    cdef unsigned char[:] wrap_v = np.asarray(wrap, dtype=np.uint8).reshape(-1)
    cdef long long[:, :] off_v = np.asarray(offsets, dtype=np.int64).reshape(len(offsets), ncoords)
    cdef const int[:] dist = np.ascontiguousarray(dist_in, dtype=np.int32)
    cdef const long long[:] order = np.ascontiguousarray(order_in, dtype=np.int64)
    cdef Py_ssize_t n = order.shape[0], nv = off_v.shape[0], k, j
    out_a = np.empty(n, dtype=np.int32)
    cdef int[:] out = out_a
    cdef long long nidx
    cdef int best, dv
    with nogil:
        for k in range(n):
            best = 0
            for j in range(nv):
                nidx = _neighbour(order[k], off_v[j], ext_v, str_v, wrap_v, ncoords)
                if nidx < 0:
                    best = -1
                    break
                dv = dist[nidx]
                if dv < 0:
                    best = -1
                    break
                if dv > best:
                    best = dv
            out[k] = best
    return out_a
