"""Unit quaternions of the binary tetrahedral and icosahedral groups.

Elements are stored as float 4-vectors ``(w, x, y, z)`` meaning
``w + x i + y j + z k``.  Group elements are well separated on the unit
sphere, so products are matched back to group elements by nearest
neighbour with a hard tolerance.
"""

from __future__ import annotations

import itertools

import numpy as np

PHI = (1 + 5 ** 0.5) / 2
_MATCH_TOL = 1e-9


def qmul(p, q):
    """Hamilton product of two quaternions (or stacks of quaternions)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    w1, x1, y1, z1 = np.moveaxis(p, -1, 0)
    w2, x2, y2, z2 = np.moveaxis(q, -1, 0)
    return np.stack([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ], axis=-1)


def qconj(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def _even_permutations(n):
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        if inversions % 2 == 0:
            yield perm


def _sort_key(q):
    # lexicographic on rounded coordinates, descending so that 1 comes first
    return tuple(-round(float(c), 9) for c in q)


def quaternion_group_q8():
    units = []
    for axis in range(4):
        for sign in (1.0, -1.0):
            q = np.zeros(4)
            q[axis] = sign
            units.append(q)
    return np.array(sorted(units, key=_sort_key))


def binary_tetrahedral():
    """The 24 elements of T*24: the Hurwitz units."""
    elems = list(quaternion_group_q8())
    for signs in itertools.product((0.5, -0.5), repeat=4):
        elems.append(np.array(signs))
    return np.array(sorted(elems, key=_sort_key))


def binary_icosahedral():
    """The 120 elements of I*120 (vertices of the 600-cell)."""
    elems = list(binary_tetrahedral())
    base = (0.0, 0.5, PHI / 2, 1 / (2 * PHI))
    seen = set()
    for perm in _even_permutations(4):
        for signs in itertools.product((1, -1), repeat=3):
            v = np.zeros(4)
            vals = [base[0], base[1] * signs[0], base[2] * signs[1], base[3] * signs[2]]
            for src, dst in enumerate(perm):
                v[dst] = vals[src]
            key = tuple(np.round(v, 9))
            if key not in seen:
                seen.add(key)
                elems.append(v)
    out = np.array(sorted(elems, key=_sort_key))
    assert len(out) == 120
    return out


class QuaternionGroup:
    """A finite group of unit quaternions with index-based multiplication."""

    def __init__(self, elements):
        self.elements = np.asarray(elements, dtype=float)
        n = len(self.elements)
        prods = qmul(self.elements[:, None, :], self.elements[None, :, :])
        self.table = np.empty((n, n), dtype=np.int64)
        for a in range(n):
            self.table[a] = self._lookup(prods[a])
        self.identity = self.index([1.0, 0.0, 0.0, 0.0])

    def __len__(self):
        return len(self.elements)

    def _lookup(self, qs):
        qs = np.atleast_2d(qs)
        d = np.linalg.norm(qs[:, None, :] - self.elements[None, :, :], axis=-1)
        idx = d.argmin(axis=1)
        if not np.all(d[np.arange(len(qs)), idx] < _MATCH_TOL):
            raise ValueError("quaternion is not an element of the group")
        return idx

    def index(self, q):
        return int(self._lookup(q)[0])

    def mul(self, a, b):
        return int(self.table[a, b])

    def inverse(self, a):
        return int(np.nonzero(self.table[a] == self.identity)[0][0])

    def left_cosets(self, subgroup):
        """Left cosets ``g H`` of a subgroup given as element indices.

        Cosets are ordered by their smallest element index and each coset is
        returned as a sorted list.
        """
        subgroup = list(subgroup)
        seen = set()
        cosets = []
        for g in range(len(self)):
            if g in seen:
                continue
            coset = sorted(self.mul(g, h) for h in subgroup)
            seen.update(coset)
            cosets.append(coset)
        return cosets

    def subgroup_indices(self, elements):
        return [self.index(q) for q in elements]
