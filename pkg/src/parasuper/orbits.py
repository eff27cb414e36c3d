"""Orbit machinery for the linear actions used throughout.

Every action here is by invertible linear maps on a finite coordinate space
F_p^dim; points are packed little-endian base-p integers.  Orbits are closed
under generators via breadth-first search, whole spaces are partitioned via
full permutation arrays, and the ambient groups acting are never enumerated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ResourceGuardError, ValidationError


@dataclass
class LinearAction:
    """A named generator action on F_p^dim; matrices act on column coords."""
    label: str
    p: int
    dim: int
    gen_mats: list                      # numpy (dim, dim) int64 matrices

    @property
    def size(self):
        return self.p ** self.dim

    def powers(self):
        return np.array([self.p ** t for t in range(self.dim)], dtype=np.int64)

    def unpack(self, pts):
        pts = np.atleast_1d(np.asarray(pts, dtype=np.int64))
        return (pts[:, None] // self.powers()[None, :]) % self.p

    def pack(self, digits):
        return (np.asarray(digits, dtype=np.int64) % self.p) @ self.powers()

    def apply(self, mat, pts):
        return self.pack(self.unpack(pts) @ np.asarray(mat).T)

    def full_perms(self, guard=10 ** 7):
        if self.size > guard:
            raise ResourceGuardError("space of size %d exceeds guard %d" % (self.size, guard))
        digits = self.unpack(np.arange(self.size))
        return [self.pack(digits @ np.asarray(m).T) for m in self.gen_mats]


@dataclass
class Orbit:
    """A generator-closed point set with a deterministic representative."""
    points: np.ndarray                  # sorted packed points
    rep: int = field(init=False)

    def __post_init__(self):
        self.points = np.unique(np.asarray(self.points, dtype=np.int64))
        self.rep = int(self.points[0])

    @property
    def size(self):
        return int(self.points.size)

    def contains(self, pt):
        i = np.searchsorted(self.points, pt)
        return i < self.points.size and self.points[i] == pt


def orbit_closure(seed, action):
    """BFS closure of one point under the action's generators."""
    seed = int(seed)
    if not 0 <= seed < action.size:
        raise ValidationError("seed", "seed %d outside space of size %d" % (seed, action.size))
    seen = {seed}
    frontier = np.array([seed], dtype=np.int64)
    while frontier.size:
        new = []
        for m in action.gen_mats:
            img = action.apply(m, frontier)
            for x in np.unique(img):
                x = int(x)
                if x not in seen:
                    seen.add(x)
                    new.append(x)
        frontier = np.array(new, dtype=np.int64)
    return Orbit(np.fromiter(seen, dtype=np.int64, count=len(seen)))


def partition_orbits(action, guard=10 ** 7):
    """Disjoint orbits covering the whole space; sizes sum to p^dim."""
    perms = action.full_perms(guard)
    n = action.size
    label = np.full(n, -1, dtype=np.int64)
    orbits = []
    for start in range(n):
        if label[start] >= 0:
            continue
        cid = len(orbits)
        label[start] = cid
        frontier = np.array([start], dtype=np.int64)
        members = [frontier]
        while frontier.size:
            nxt = []
            for pm in perms:
                img = pm[frontier]
                fresh = np.unique(img[label[img] < 0])
                if fresh.size:
                    label[fresh] = cid
                    nxt.append(fresh)
            frontier = np.concatenate(nxt) if nxt else np.array([], dtype=np.int64)
            if frontier.size:
                members.append(frontier)
        orbits.append(Orbit(np.concatenate(members)))
    total = sum(o.size for o in orbits)
    assert total == n, "orbit sizes %d do not cover the space %d" % (total, n)
    return orbits


def stabilizer_in_levi(world, orbit, space="ustar", mode="setwise"):
    """Levi elements fixing an orbit as a set or point by point.

    The pointwise stabilizer is contained in the setwise one; both are
    subgroups, and closure under products is guaranteed because the whole
    Levi subgroup acts.
    """
    if mode not in ("setwise", "pointwise"):
        raise ValidationError("mode", "mode must be setwise or pointwise")
    from . import groups as G
    if space == "ustar":
        mat_of = lambda h: G.ustar_action_matrix(world.spec, h)
    elif space == "u":
        mat_of = lambda h: G.u_action_matrix(world.spec, h)
    else:
        raise ValidationError("space", "space must be 'u' or 'ustar'")
    p = world.spec.p
    digits = (orbit.points[:, None]
              // np.array([p ** t for t in range(world.spec.u_dim)])[None, :]) % p
    powers = np.array([p ** t for t in range(world.spec.u_dim)], dtype=np.int64)
    out = []
    for hid, h in enumerate(world.L):
        img = ((digits @ np.asarray(mat_of(h)).T) % p) @ powers
        if mode == "pointwise":
            ok = bool(np.array_equal(img, orbit.points))
        else:
            ok = bool(np.array_equal(np.sort(img), orbit.points))
        if ok:
            out.append(hid)
    return out


# ---------------------------------------------------------------------------
# subspaces and quotients

def enumerate_subspace(basis, p, dim=None):
    """All points of a row-span subspace, as a (p^k, dim) digit array."""
    if not basis:
        return np.zeros((1, dim if dim is not None else 0), dtype=np.int64)
    k = len(basis)
    dim = len(basis[0])
    count = p ** k
    powers = np.array([p ** t for t in range(k)], dtype=np.int64)
    coeffs = (np.arange(count, dtype=np.int64)[:, None] // powers[None, :]) % p
    return (coeffs @ np.asarray(basis, dtype=np.int64)) % p


class QuotientSpace:
    """Coordinates on V / W for a subspace W given by basis rows."""

    def __init__(self, dim, sub_basis, p):
        self.p = p
        self.dim = dim
        red, pivots = linalg.rref(sub_basis, p) if sub_basis else ([], [])
        self.sub_rref = red
        self.sub_pivots = pivots
        self.free = [c for c in range(dim) if c not in set(pivots)]
        self.qdim = len(self.free)
        self.reduce_mat = np.array(self_reduce_matrix(red, pivots, dim, p), dtype=np.int64)
        self.proj = self.reduce_mat[self.free, :] % p      # (qdim, dim)
        lift = np.zeros((dim, self.qdim), dtype=np.int64)
        for t, c in enumerate(self.free):
            lift[c, t] = 1
        self.lift_mat = lift

    def project_mats(self, mats):
        """Induced action matrices on the quotient (requires invariance)."""
        out = []
        for m in mats:
            out.append((self.proj @ (np.asarray(m, dtype=np.int64) @ self.lift_mat)) % self.p)
        return out

    def invariant_under(self, mats):
        if not self.sub_rref:
            return True
        basis = np.asarray(self.sub_rref, dtype=np.int64)
        for m in mats:
            img = (basis @ np.asarray(m, dtype=np.int64).T) % self.p
            for v in img:
                if any(linalg.reduce_vec(self.sub_rref, self.sub_pivots, v.tolist(), self.p)):
                    return False
        return True

    def action(self, label, base_action):
        if not self.invariant_under(base_action.gen_mats):
            raise ValidationError("not-invariant",
                                  "subspace is not invariant under the action %r" % base_action.label)
        return LinearAction(label, self.p, self.qdim, self.project_mats(base_action.gen_mats))

    def coset_points(self, quotient_pts, base_action):
        """All packed ambient points lying over the given quotient points."""
        sub_pts = enumerate_subspace(self.sub_rref, self.p, self.dim)   # (s, dim)
        qdigits = LinearAction("q", self.p, self.qdim, []).unpack(quotient_pts)  # (m, qdim)
        lifts = (qdigits @ self.lift_mat.T) % self.p               # (m, dim)
        total = (lifts[:, None, :] + sub_pts[None, :, :]) % self.p
        return base_action.pack(total.reshape(-1, self.dim))


def quotient_orbits(base_action, sub_basis, guard=10 ** 7):
    """Orbit partition of the quotient by an invariant subspace."""
    qs = QuotientSpace(base_action.dim, sub_basis, base_action.p)
    qact = qs.action(base_action.label + "/sub", base_action)
    return qs, partition_orbits(qact, guard)


def smallest_bimodule(world, h):
    """Smallest two-sidedly invariant subspace moving h's conjugation defect.

    Returns (basis of the subspace of Uc, basis of its intersection with u in
    root coordinates).  The subspace contains h x h^-1 - x for all x in Uc and
    is closed under multiplication by Uc on both sides, which is equivalent to
    invariance under the two-sided unipotent group action.
    """
    from . import groups as G
    spec = world.spec
    p = spec.p
    hi = G.mat_inv(h, p)
    basis_rows = []
    pivots = []
    queue = []

    def insert(vec, mat):
        nonlocal basis_rows, pivots
        red = linalg.reduce_vec(basis_rows, pivots, vec, p)
        if any(red):
            basis_rows, pivots = linalg.rref(basis_rows + [red], p)
            queue.append(mat)
            return True
        return False

    unit_mats = [spec.E(i, j) for (i, j) in spec.uc_positions]
    for em in unit_mats:
        m = G.mat_sub(G.mat_mul(G.mat_mul(h, em, p), hi, p), em, p)
        insert(spec.uc_coords(m, check=False), m)
    while queue:
        w = queue.pop()
        for em in unit_mats:
            for prod in (G.mat_mul(em, w, p), G.mat_mul(w, em, p)):
                insert(spec.uc_coords(prod, check=False), prod)

    # intersection with u, expressed in root coordinates
    emb = spec.u_embed_matrix()                     # uc_dim rows x u_dim cols
    R = np.array(self_reduce_matrix(basis_rows, pivots, spec.uc_dim, p), dtype=np.int64)
    cond = (R @ np.array(emb, dtype=np.int64)) % p  # maps u coords to quotient residues
    kern = linalg.right_kernel([tuple(r) for r in cond.tolist()], p, spec.u_dim)
    ured, _ = linalg.rref(kern, p) if kern else ([], [])
    return list(basis_rows), list(ured)


def self_reduce_matrix(rref_rows, pivots, dim, p):
    """Matrix of v -> v reduced modulo the rref span (0 iff v in span).

    In rref, pivot columns vanish in every other row, so the reduction is the
    single linear map that clears each pivot coordinate and subtracts the
    matching multiples elsewhere.
    """
    R = [[1 if c == d else 0 for d in range(dim)] for c in range(dim)]
    for row, piv in zip(rref_rows, pivots):
        for c in range(dim):
            R[c][piv] = 0 if c == piv else (-row[c]) % p
    return R
