"""Pure-Python twins of the compiled kernels in ``_ckernels.pyx``.

Both modules expose the same two functions with identical semantics.  The
group elements live in a dense box: coordinate ``i`` ranges over
``[0, extents[i])`` after adding ``shift[i]``; torsion coordinates wrap,
free coordinates falling outside the box are simply not neighbours.
"""

from __future__ import annotations

from array import array

import numpy as np


class CapExceeded(RuntimeError):
    """Raised when an enumeration would exceed its element cap."""


def _strides(extents):
    strides = [1] * len(extents)
    for i in range(len(extents) - 2, -1, -1):
        strides[i] = strides[i + 1] * extents[i + 1]
    return strides


def bfs_ball(extents, shift, wrap, steps, radius, trans, start_state, max_elements):
    """Breadth-first ball of the Cayley graph in shortlex discovery order.

    ``steps[x]`` is the coordinate vector of letter ``x``.  Frontier elements
    are expanded in discovery order and letters in alphabet order, so the
    first word to reach an element is its shortlex normal form.  When
    ``trans`` (states x letters, -1 = failure) is given, the acceptor state
    of each normal form is tracked alongside.

    Returns ``(dist, last, state, order, layer_ends)``.
    """
    ncoords = len(extents)
    strides = _strides(extents)
    size = 1
    for e in extents:
        size *= e
    nletters = len(steps)
    dist = array("i", [-1]) * size
    last = array("b", [-1]) * size
    track = trans is not None
    state = array("i", [-1]) * size if track else None
    if track:
        trans_rows = [list(map(int, row)) for row in trans]

    origin = sum(shift[i] * strides[i] for i in range(ncoords))
    dist[origin] = 0
    if track:
        state[origin] = start_state
    order = [origin]
    layer_ends = [1]
    head = 0
    steps = [list(map(int, s)) for s in steps]
    for level in range(radius):
        end = len(order)
        while head < end:
            idx = order[head]
            head += 1
            rem = idx
            coords = [0] * ncoords
            for i in range(ncoords):
                coords[i], rem = divmod(rem, strides[i])
            st = state[idx] if track else -1
            for x in range(nletters):
                step = steps[x]
                nidx = 0
                for i in range(ncoords):
                    c = coords[i] + step[i]
                    if wrap[i]:
                        c %= extents[i]
                    elif c < 0 or c >= extents[i]:
                        nidx = -1
                        break
                    nidx += c * strides[i]
                if nidx < 0 or dist[nidx] >= 0:
                    continue
                dist[nidx] = level + 1
                last[nidx] = x
                if track:
                    state[nidx] = trans_rows[st][x] if st >= 0 else -1
                order.append(nidx)
                if len(order) > max_elements:
                    raise CapExceeded(f"ball exceeds {max_elements} elements")
        layer_ends.append(len(order))
    return (
        np.frombuffer(dist, dtype=np.int32).copy(),
        np.frombuffer(last, dtype=np.int8).copy(),
        np.frombuffer(state, dtype=np.int32).copy() if track else None,
        np.asarray(order, dtype=np.int64),
        np.asarray(layer_ends, dtype=np.int64),
    )


def max_offset_distance(dist, extents, shift, wrap, order, offsets):
    """For each ball element ``g`` (in ``order``) the largest distance of
    ``g + v`` over ``v`` in ``offsets``; -1 where some ``g + v`` leaves the
    enumerated ball."""
    ncoords = len(extents)
    strides = _strides(extents)
    offsets = [list(map(int, v)) for v in offsets]
    dist_l = dist.tolist()
    out = array("i", [0]) * len(order)
    for n, idx in enumerate(order.tolist()):
        rem = idx
        coords = [0] * ncoords
        for i in range(ncoords):
            coords[i], rem = divmod(rem, strides[i])
        best = 0
        for v in offsets:
            nidx = 0
            for i in range(ncoords):
                c = coords[i] + v[i]
                if wrap[i]:
                    c %= extents[i]
                elif c < 0 or c >= extents[i]:
                    nidx = -1
                    break
                nidx += c * strides[i]
            if nidx < 0 or dist_l[nidx] < 0:
                best = -1
                break
            if dist_l[nidx] > best:
                best = dist_l[nidx]
        out[n] = best
    return np.frombuffer(out, dtype=np.int32).copy()
