"""AG(d,p) machinery and line-filling lifts.

The construction at the heart of the package: pick orbit representatives of
a coordinate-permuting group on the lines of AG(d,p), plant a copy of a
p-point ingredient design on each representative through the line's affine
parametrization, and push it to the rest of the orbit by transporters.  With
the right ingredient the filled space is a 2-(p^d,k,1)-design admitting the
group.

Two variants: the odd-order lift plants a multiplier-invariant base design
directly (every induced line action of odd order dividing t is already an
automorphism); the aligned lift first conjugates each induced line action
into a prescribed cyclic automorphism of the ingredient.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .basedesigns import BaseBlockDesign
from .design import Design, is_automorphism
from .errors import (
    AlignmentImpossible,
    BadParams,
    Budget,
    DivisibilityViolation,
    NotSemiregular,
    NotStabilizing,
    OrderMismatch,
    ParityViolation,
    PlantRejected,
)
from .permgrp import (
    OrbitDecomposition,
    PermGroup,
    Permutation,
    align_semiregular_cyclic,
)

DEFAULT_LINE_BUDGET = 2_000_000


@dataclass(frozen=True)
class AffineSpace:
    """AG(d,p): points are F_p^d, indexed by radix-p encoding (coords[0] least
    significant)."""

    d: int
    p: int

    @property
    def point_count(self) -> int:
        return self.p ** self.d

    @property
    def line_count(self) -> int:
        return self.p ** (self.d - 1) * (self.p ** self.d - 1) // (self.p - 1)

    @cached_property
    def coords(self) -> np.ndarray:
        """(p^d, d) coordinate matrix; row i decodes point i."""
        idx = np.arange(self.point_count, dtype=np.int64)
        cols = [(idx // self.p**j) % self.p for j in range(self.d)]
        out = np.stack(cols, axis=1)
        out.setflags(write=False)
        return out

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([self.p**j for j in range(self.d)], dtype=np.int64)

    def encode(self, vec: Sequence[int]) -> int:
        return int(sum(int(c) % self.p * self.p**j for j, c in enumerate(vec)))

    def decode(self, idx: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.coords[idx])


@dataclass(frozen=True)
class Line:
    """A line of AG(d,p) in canonical form: base is its minimal point, the
    direction's first nonzero coordinate is 1, and points lists
    base + x*direction in x-order, identifying the line with F_p."""

    base: int
    direction: tuple[int, ...]
    points: tuple[int, ...]


class LineTable(Sequence):
    """All lines of a space in canonical order, array-backed.

    Row i of ``points`` holds line i's points in parametrization order;
    sorted row keys make line lookup and group actions on lines cheap.
    """

    def __init__(self, space: AffineSpace, bases: np.ndarray, dirs: np.ndarray,
                 points: np.ndarray):
        self.space = space
        self.bases = bases
        self.dirs = dirs
        self.points = points
        self.sorted_points = np.sort(points, axis=1)

    def __len__(self) -> int:
        return self.points.shape[0]

    def __getitem__(self, i: int) -> Line:
        return Line(int(self.bases[i]), tuple(int(c) for c in self.dirs[i]),
                    tuple(int(x) for x in self.points[i]))

    @cached_property
    def index_of(self) -> dict[bytes, int]:
        return {row.tobytes(): i for i, row in enumerate(self.sorted_points)}

    def line_index(self, pts: np.ndarray) -> int:
        return self.index_of[np.sort(np.asarray(pts, dtype=np.int64)).tobytes()]


def _canonical_directions(space: AffineSpace) -> np.ndarray:
    """Direction vectors with first nonzero coordinate 1: one per line pencil."""
    d, p = space.d, space.p
    rows = []
    for f in range(d):
        tail_count = p ** (d - 1 - f)
        for m in range(tail_count):
            vec = [0] * f + [1]
            rest = m
            for _ in range(d - 1 - f):
                vec.append(rest % p)
                rest //= p
            rows.append(vec)
    return np.array(rows, dtype=np.int64)


def all_lines(space: AffineSpace, budget: int = DEFAULT_LINE_BUDGET) -> LineTable:
    """Every line exactly once, sorted by (base point, encoded direction)."""
    if space.line_count > budget:
        raise Budget(f"{space.line_count} lines exceeds the budget {budget}")
    d, p = space.d, space.p
    coords = space.coords
    weights = space.weights
    dirs = _canonical_directions(space)
    all_points = []
    all_dirs = []
    for vec in dirs:
        f = int(np.flatnonzero(vec)[0])
        anchors = coords[coords[:, f] == 0]
        cols = [((anchors + x * vec) % p) @ weights for x in range(p)]
        pts = np.stack(cols, axis=1)
        all_points.append(pts)
        all_dirs.append(np.broadcast_to(vec, (pts.shape[0], d)))
    points = np.concatenate(all_points, axis=0)
    dirvecs = np.concatenate(all_dirs, axis=0)
    # re-anchor each row at its minimal point, preserving the parametrization
    x0 = np.argmin(points, axis=1)
    roll = (x0[:, None] + np.arange(p)[None, :]) % p
    points = points[np.arange(points.shape[0])[:, None], roll]
    bases = points[:, 0]
    order = np.lexsort((dirvecs @ weights, bases))
    return LineTable(space, bases[order], dirvecs[order], points[order])


@dataclass(frozen=True)
class AffineMap:
    """v -> v*M + c on F_p^d (row-vector convention)."""

    matrix: tuple[tuple[int, ...], ...]
    translation: tuple[int, ...]
    p: int

    def __post_init__(self):
        if _rank_mod_p(self.matrix, self.p) != len(self.matrix):
            raise BadParams("matrix is singular")

    def apply_coords(self, vec: Sequence[int]) -> tuple[int, ...]:
        d, p = len(self.translation), self.p
        return tuple(
            (sum(vec[i] * self.matrix[i][j] for i in range(d)) + self.translation[j]) % p
            for j in range(d))

    def to_permutation(self, space: AffineSpace) -> Permutation:
        mat = np.array(self.matrix, dtype=np.int64)
        trans = np.array(self.translation, dtype=np.int64)
        img = ((space.coords @ mat + trans) % self.p) @ space.weights
        return Permutation(tuple(int(x) for x in img))


def _rank_mod_p(matrix, p: int) -> int:
    m = [list(row) for row in matrix]
    rank = 0
    d = len(m)
    for col in range(d):
        pivot = next((r for r in range(rank, d) if m[r][col] % p), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = pow(m[rank][col], -1, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for r in range(d):
            if r != rank and m[r][col] % p:
                f = m[r][col]
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def coordinate_group(group: PermGroup, space: AffineSpace
                     ) -> tuple[PermGroup, list[AffineMap]]:
    """Represent a group of coordinate permutations as point permutations of
    the space (via permutation matrices), plus the same maps as AffineMap."""
    if group.degree != space.d:
        raise BadParams(f"group degree {group.degree} != dimension {space.d}")
    gens = []
    maps = []
    for g in group.generators:
        mat = tuple(tuple(1 if j == g.images[i] else 0 for j in range(space.d))
                    for i in range(space.d))
        amap = AffineMap(mat, (0,) * space.d, space.p)
        maps.append(amap)
        gens.append(amap.to_permutation(space))
    return PermGroup(space.point_count, gens), maps


def induced_affine_on_line(amap: AffineMap, line: Line, space: AffineSpace
                           ) -> tuple[int, int]:
    """Coefficients (a, b) of the action x -> a*x + b induced on a stabilized
    line in its canonical parametrization."""
    p = space.p
    pos = {pt: x for x, pt in enumerate(line.points)}
    img0 = space.encode(amap.apply_coords(space.decode(line.points[0])))
    img1 = space.encode(amap.apply_coords(space.decode(line.points[1])))
    if img0 not in pos or img1 not in pos:
        raise NotStabilizing("map does not stabilize the line")
    b = pos[img0]
    a = (pos[img1] - b) % p
    for x in range(2, p):
        img = space.encode(amap.apply_coords(space.decode(line.points[x])))
        if pos.get(img) != (a * x + b) % p:
            raise NotStabilizing("map is not affine on the line parametrization")
    return a, b


def induced_perm_on_line(perm: Permutation, line: Line) -> Permutation:
    """The degree-p permutation induced on a stabilized line's parametrization."""
    pos = {pt: x for x, pt in enumerate(line.points)}
    try:
        return Permutation(tuple(pos[perm.images[pt]] for pt in line.points))
    except KeyError:
        raise NotStabilizing("permutation does not stabilize the line")


# -- orbit machinery on lines ---------------------------------------------------

def _line_index_permutations(table: LineTable, elements: Sequence[Permutation]
                             ) -> list[np.ndarray]:
    lookup = table.index_of
    out = []
    for g in elements:
        img = np.sort(g.array[table.points], axis=1)
        arr = np.fromiter((lookup[row.tobytes()] for row in img),
                          dtype=np.int64, count=len(table))
        out.append(arr)
    return out


def _orbit_sweep(index_perms: list[np.ndarray], n: int):
    """Representatives, transporter element index per line, rep per line."""
    visited = np.zeros(n, dtype=bool)
    rep_of = np.empty(n, dtype=np.int64)
    trans = np.empty(n, dtype=np.int64)
    reps = []
    for i in range(n):
        if visited[i]:
            continue
        reps.append(i)
        for e_idx, arr in enumerate(index_perms):
            j = int(arr[i])
            if not visited[j]:
                visited[j] = True
                rep_of[j] = i
                trans[j] = e_idx
    return reps, rep_of, trans


def line_orbits(table: LineTable, group: PermGroup) -> OrbitDecomposition:
    """Orbits of a point group on the lines, as an OrbitDecomposition over
    line indices (representative = least line index per orbit)."""
    elements = group.elements()
    perms = _line_index_permutations(table, elements)
    reps, rep_of, trans = _orbit_sweep(perms, len(table))
    members: dict[int, list[int]] = {r: [] for r in reps}
    transporter = {}
    for i in range(len(table)):
        members[int(rep_of[i])].append(i)
        transporter[i] = (int(rep_of[i]), elements[int(trans[i])])
    return OrbitDecomposition(tuple(reps), transporter,
                              tuple(tuple(members[r]) for r in reps))


# -- the lifts --------------------------------------------------------------------

@dataclass(frozen=True)
class LiftResult:
    design: Design
    group: PermGroup
    space: AffineSpace
    line_count: int
    orbit_count: int


def _assemble(table: LineTable, elements, reps, rep_of, trans,
              planted: dict[int, np.ndarray], k: int) -> Design:
    n = len(table)
    per_line = next(iter(planted.values())).shape[0]
    blocks = np.empty((n * per_line, k), dtype=np.int64)
    for i in range(n):
        rows = planted[int(rep_of[i])]
        g = elements[int(trans[i])]
        blocks[i * per_line:(i + 1) * per_line] = g.array[rows]
    return Design(table.space.point_count, k, blocks)


def lift_odd(group: PermGroup, p: int, k: int, base: BaseBlockDesign,
             line_budget: int = DEFAULT_LINE_BUDGET) -> LiftResult:
    """Fill the lines of AG(d,p) with copies of a multiplier-invariant base
    design, d = the group's degree; the filled space admits the coordinate
    image of the group and that image is 1-blocked.

    Requires |G| odd and |G| dividing t = (p-1)/k(k-1): then every induced
    line action lands inside the base design's multiplier group, so planting
    through the canonical parametrization needs no adjustment.
    """
    h = group.order()
    if h % 2 == 0:
        raise ParityViolation(f"group order {h} is even")
    if (p - 1) % (k * (k - 1)) != 0 or ((p - 1) // (k * (k - 1))) % h != 0:
        raise DivisibilityViolation(f"|G|={h} does not divide t=(p-1)/{k * (k - 1)}")
    if base.p != p or base.k != k:
        raise BadParams("base design parameters disagree with (p, k)")
    space = AffineSpace(group.degree, p)
    table = all_lines(space, line_budget)
    coord, _ = coordinate_group(group, space)
    elements = coord.elements()
    perms = _line_index_permutations(table, elements)
    reps, rep_of, trans = _orbit_sweep(perms, len(table))

    e_blocks = base.design.blocks
    planted: dict[int, np.ndarray] = {}
    for r in reps:
        param = table.points[r]
        rows = np.sort(param[e_blocks], axis=1)
        planted[r] = rows
        stabilizers = [elements[e] for e, arr in enumerate(perms) if arr[r] == r]
        for g in stabilizers:
            if g.is_identity():
                continue
            ind = induced_perm_on_line(g, table[r])
            if not is_automorphism(base.design, ind):
                raise PlantRejected(
                    f"induced action on line {r} is outside the base design's "
                    f"automorphisms")
    design = _assemble(table, elements, reps, rep_of, trans, planted, k)
    return LiftResult(design, coord, space, len(table), len(reps))


def lift_aligned(group: PermGroup, p: int, k: int, ingredient: Design,
                 cyclic_gen: Permutation,
                 line_budget: int = DEFAULT_LINE_BUDGET) -> LiftResult:
    """Line filling for groups whose induced line actions must be conjugated
    into a prescribed cyclic automorphism of the ingredient design.

    ``cyclic_gen`` generates a cyclic automorphism group of the ingredient
    with one fixed point, semiregular on the rest.  Per orbit representative,
    the induced action (cyclic of order m, one fixed point) is aligned with
    the order-m power subgroup of the prescribed group before planting.
    """
    if ingredient.v != p or ingredient.k != k:
        raise BadParams("ingredient design must live on p points with block size k")
    if not is_automorphism(ingredient, cyclic_gen):
        raise AlignmentImpossible("cyclic_gen is not an automorphism of the ingredient")
    n = cyclic_gen.order()
    cycles = cyclic_gen.cycles()
    if len(cyclic_gen.fixed_points()) != 1 or any(len(c) != n for c in cycles):
        raise AlignmentImpossible(
            "cyclic_gen must fix exactly one point and be semiregular elsewhere")
    space = AffineSpace(group.degree, p)
    table = all_lines(space, line_budget)
    coord, _ = coordinate_group(group, space)
    elements = coord.elements()
    perms = _line_index_permutations(table, elements)
    reps, rep_of, trans = _orbit_sweep(perms, len(table))

    planted: dict[int, np.ndarray] = {}
    for r in reps:
        line = table[r]
        induced_set: dict[tuple[int, ...], Permutation] = {}
        for e, arr in enumerate(perms):
            if arr[r] == r:
                ind = induced_perm_on_line(elements[e], line)
                induced_set.setdefault(ind.images, ind)
        m = len(induced_set)
        gen = None
        for images in sorted(induced_set):
            cand = induced_set[images]
            if cand.order() == m:
                gen = cand
                break
        if gen is None:
            raise AlignmentImpossible(f"induced action on line {r} is not cyclic")
        if m == 1:
            plant = ingredient
        else:
            if n % m != 0:
                raise AlignmentImpossible(
                    f"induced order {m} on line {r} does not divide {n}")
            target = cyclic_gen
            for _ in range(n // m - 1):
                target = target * cyclic_gen
            try:
                sigma = align_semiregular_cyclic(gen, target, range(p))
            except (OrderMismatch, NotSemiregular) as exc:
                raise AlignmentImpossible(f"line {r}: {exc}")
            plant = ingredient.relabel(sigma.inverse())
            for ind in induced_set.values():
                if not is_automorphism(plant, ind):
                    raise AlignmentImpossible(
                        f"aligned plant on line {r} misses an induced action")
        param = table.points[r]
        planted[r] = np.sort(param[plant.blocks], axis=1)
    design = _assemble(table, elements, reps, rep_of, trans, planted, k)
    return LiftResult(design, coord, space, len(table), len(reps))
