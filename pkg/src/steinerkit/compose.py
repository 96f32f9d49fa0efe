"""Design composition.

The product construction takes a 2-(w,k,1)-design W, a 2-(y,k,1)-design Y
with an x-point subdesign X, and a TD(k, y-x), and produces a
2-(w(y-x)+x, k, 1)-design on X u (W x Z), Z = Y - X.  Blocks come in four
sorts: X's own blocks, per W-point copies of Y's remaining blocks, and a TD
copy on A x Z per W-block A.

Two symmetry-preserving refinements: a 1-blocked automorphism group of W
extends to a 1-blocked group of the product (TD copies planted per block
orbit and pushed by transporters), and a semiregular cyclic group of order k
on W extends to a cyclic group fixing one point and semiregular elsewhere,
by aligning each stabilized TD copy with a group-rotating automorphism of
the TD ingredient.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .design import (
    Design,
    SubdesignEmbedding,
    is_1_blocked,
    is_automorphism,
    is_subdesign,
    verify_2design,
)
from .errors import (
    AlignmentImpossible,
    AxiomViolation,
    BadParams,
    NotOneBlocked,
    StabilizerViolation,
    Unavailable,
)
from .netstd import TransversalDesign, cyclic_td, mols_td, verify_td
from .permgrp import PermGroup, Permutation


def default_td_supplier(k: int, n: int) -> TransversalDesign:
    try:
        return mols_td(k, n)
    except Unavailable:
        if k == 3:
            return cyclic_td(3, n).td
        raise


@dataclass
class CompositionPlan:
    """Ingredients for the product: W, Y, the subdesign point set of Y, a TD
    source, and optionally a group on W's points for the 1-blocked lift."""

    W: Design
    Y: Design
    x_points: tuple[int, ...]
    td_supplier: Callable[[int, int], TransversalDesign] = default_td_supplier
    group: PermGroup | None = None


class _Indexer:
    """Point indexing of the product: X first (0..x-1 in Y order), then
    (a, z) pairs in row-major order over W points and Z ranks."""

    def __init__(self, plan: CompositionPlan):
        self.k = plan.W.k
        self.w = plan.W.v
        self.y = plan.Y.v
        self.x_sorted = tuple(sorted(plan.x_points))
        self.x = len(self.x_sorted)
        self.zlen = self.y - self.x
        z_points = [z for z in range(self.y) if z not in set(self.x_sorted)]
        self.z_rank = {z: j for j, z in enumerate(z_points)}
        self.x_index = {xp: i for i, xp in enumerate(self.x_sorted)}
        self.u = self.x + self.w * self.zlen

    def wz(self, a: int, rank: int) -> int:
        return self.x + a * self.zlen + rank

    def bar(self, perm: Permutation) -> Permutation:
        """Extend a permutation of W's points to the product: fixes X, sends
        (a, z) to (a^g, z)."""
        images = list(range(self.u))
        for a in range(self.w):
            base = self.x + a * self.zlen
            target = self.x + perm.images[a] * self.zlen
            for j in range(self.zlen):
                images[base + j] = target + j
        return Permutation(tuple(images))


def _embedding(plan: CompositionPlan) -> SubdesignEmbedding:
    emb = is_subdesign(plan.Y, plan.x_points)
    if emb is None:
        raise BadParams(f"points {tuple(sorted(plan.x_points))} are not a subdesign of Y")
    return emb


def _nontd_blocks(plan: CompositionPlan, idx: _Indexer,
                  emb: SubdesignEmbedding) -> list[tuple[int, ...]]:
    """Sorts one and two: X's blocks, and per W-point copies of Y's blocks
    not inside X."""
    xset = set(idx.x_sorted)
    blocks = [tuple(sorted(idx.x_index[p] for p in blk)) for blk in emb.induced_blocks]
    inside = set(emb.induced_blocks)
    for blk in plan.Y.block_tuples():
        if blk in inside:
            continue
        hits = [p for p in blk if p in xset]
        if len(hits) > 1:
            raise AxiomViolation("subdesign closure violated")
        for a in range(idx.w):
            if hits:
                row = [idx.x_index[hits[0]]]
                row += [idx.wz(a, idx.z_rank[z]) for z in blk if z not in xset]
            else:
                row = [idx.wz(a, idx.z_rank[z]) for z in blk]
            blocks.append(tuple(sorted(row)))
    return blocks


def _td_point_positions(td: TransversalDesign) -> dict[int, tuple[int, int]]:
    return {p: (g, j) for g, grp in enumerate(td.groups) for j, p in enumerate(grp)}


def _place_td(td: TransversalDesign, idx: _Indexer, a_of_group: dict[int, int],
              pos) -> list[tuple[int, ...]]:
    """Map TD blocks into the product through group -> W-point assignment;
    the j-th point of a TD group lands on Z rank j."""
    out = []
    for blk in td.blocks:
        row = []
        for p in blk:
            g, j = pos[p]
            row.append(idx.wz(a_of_group[g], j))
        out.append(tuple(sorted(row)))
    return out


def product_design(plan: CompositionPlan, check: bool = True) -> Design:
    """The plain product: one TD copy per W-block, placed canonically."""
    idx = _Indexer(plan)
    if plan.W.k != plan.Y.k:
        raise BadParams("W and Y must share the block size")
    emb = _embedding(plan)
    td = plan.td_supplier(idx.k, idx.zlen)
    verify_td(td)
    if td.n != idx.zlen or td.k != idx.k:
        raise BadParams(f"TD({td.k},{td.n}) does not match (k, y-x) = ({idx.k},{idx.zlen})")
    blocks = _nontd_blocks(plan, idx, emb)
    pos = _td_point_positions(td)
    for ablock in plan.W.block_tuples():
        a_of_group = {g: ablock[g] for g in range(idx.k)}
        blocks.extend(_place_td(td, idx, a_of_group, pos))
    out = Design(idx.u, idx.k, blocks)
    if check:
        report = verify_2design(out)
        if not report.ok:
            raise AxiomViolation(f"product failed verification: {report}")
    return out


def product_design_1blocked(plan: CompositionPlan, check: bool = True
                            ) -> tuple[Design, PermGroup]:
    """Product that carries a 1-blocked group of W to a 1-blocked group of
    the output: TD copies are planted on block-orbit representatives only
    and pushed by transporters (well-defined exactly because the group is
    1-blocked on W)."""
    if plan.group is None:
        raise BadParams("plan.group is required")
    group = plan.group
    ok, witness = is_1_blocked(plan.W, group)
    if not ok:
        raise NotOneBlocked(witness)
    idx = _Indexer(plan)
    emb = _embedding(plan)
    td = plan.td_supplier(idx.k, idx.zlen)
    verify_td(td)
    blocks = _nontd_blocks(plan, idx, emb)
    pos = _td_point_positions(td)

    elements = group.elements()
    wblocks = plan.W.block_tuples()
    windex = {blk: i for i, blk in enumerate(wblocks)}
    visited = [False] * len(wblocks)
    for i, ablock in enumerate(wblocks):
        if visited[i]:
            continue
        a_of_group = {g: ablock[g] for g in range(idx.k)}
        placed = _place_td(td, idx, a_of_group, pos)
        for g in elements:
            j = windex[tuple(sorted(g.images[p] for p in ablock))]
            if visited[j]:
                continue
            visited[j] = True
            gbar = idx.bar(g)
            blocks.extend(tuple(sorted(gbar.images[p] for p in blk)) for blk in placed)
    out = Design(idx.u, idx.k, blocks)
    bar_group = PermGroup(idx.u, [idx.bar(g) for g in group.generators])
    if check:
        report = verify_2design(out)
        if not report.ok:
            raise AxiomViolation(f"product failed verification: {report}")
        ok, witness = is_1_blocked(out, bar_group)
        if not ok:
            raise AxiomViolation(f"lifted group lost 1-blockedness: {witness}")
    return out, bar_group


def cyclic_product_design(W: Design, c_w: Permutation, Y: Design,
                          td: TransversalDesign, td_rotator: Permutation | None,
                          check: bool = True) -> tuple[Design, PermGroup]:
    """Product with x = 1 carrying a semiregular cyclic group of order k on W
    to a cyclic group of the output fixing exactly one point.

    Requires every W-block stabilizer under <c_w> to be trivial or the whole
    group; stabilized blocks (the point-orbit blocks) get their TD copy
    aligned through ``td_rotator``, an order-k automorphism of the TD that is
    semiregular on points and rotates the k groups in a single cycle.
    """
    k = W.k
    if Y.k != k or td.k != k or td.n != Y.v - 1:
        raise BadParams("ingredients disagree on k or the TD group size")
    if not is_automorphism(W, c_w):
        raise StabilizerViolation("c_w is not an automorphism of W")
    order = c_w.order()
    if order not in (1, k):
        raise StabilizerViolation(f"c_w must have order {k} (or 1), got {order}")
    powers = [Permutation.identity(W.v)]
    for _ in range(order - 1):
        powers.append(powers[-1] * c_w)
    if order > 1 and any(p.fixed_points() for p in powers[1:]):
        raise StabilizerViolation("c_w must be semiregular on W's points")

    plan = CompositionPlan(W, Y, (0,), td_supplier=lambda *_: td)
    idx = _Indexer(plan)
    emb = _embedding(plan)
    blocks = _nontd_blocks(plan, idx, emb)
    pos = _td_point_positions(td)

    rotation = None
    if td_rotator is not None:
        if not td.is_automorphism(td_rotator) or td_rotator.order() != k:
            raise AlignmentImpossible("td_rotator must be an order-k TD automorphism")
        if any(td_rotator.images[p] == p for p in range(td.point_count)):
            raise AlignmentImpossible("td_rotator must be semiregular on points")
        rotation = td.group_action(td_rotator)
        if len(rotation.cycles()) != 1 or len(rotation.cycles()[0]) != k:
            raise AlignmentImpossible("td_rotator must rotate the k groups in one cycle")

    wblocks = W.block_tuples()
    windex = {blk: i for i, blk in enumerate(wblocks)}
    visited = [False] * len(wblocks)
    for i, ablock in enumerate(wblocks):
        if visited[i]:
            continue
        orbit = []
        for p in powers:
            j = windex[tuple(sorted(p.images[q] for q in ablock))]
            if j not in orbit:
                orbit.append(j)
        stab_size = order // len(orbit)
        if stab_size not in (1, order):
            raise StabilizerViolation(
                f"block {ablock} has stabilizer of size {stab_size}")
        for j in orbit:
            visited[j] = True
        if len(orbit) == order or order == 1:
            # free orbit: place canonically at the representative, push around
            a_of_group = {g: ablock[g] for g in range(k)}
            placed = _place_td(td, idx, a_of_group, pos)
            blocks.extend(placed)
            for p in powers[1:]:
                pbar = idx.bar(p)
                blocks.extend(tuple(sorted(pbar.images[q] for q in blk))
                              for blk in placed)
        else:
            # the block is a <c_w>-orbit: align the TD copy with the rotator
            if rotation is None:
                raise AlignmentImpossible(
                    f"stabilized block {ablock} needs a group-rotating TD automorphism")
            anchor = min(ablock)
            b_seq = [anchor]
            for _ in range(k - 1):
                b_seq.append(c_w.images[b_seq[-1]])
            phi: dict[int, int] = {}
            for rank, t in enumerate(td.groups[0]):
                point = t
                for j in range(k):
                    phi[point] = idx.wz(b_seq[j], rank)
                    point = td_rotator.images[point]
            blocks.extend(tuple(sorted(phi[p] for p in blk)) for blk in td.blocks)

    out = Design(idx.u, k, blocks)
    cbar = PermGroup(idx.u, [idx.bar(c_w)])
    if check:
        report = verify_2design(out)
        if not report.ok:
            raise AxiomViolation(f"assembly failed verification: {report}")
        for g in cbar.elements():
            if g.is_identity():
                continue
            if not is_automorphism(out, g):
                raise AxiomViolation("extended cyclic group is not an automorphism group")
            if g.fixed_points() != (0,):
                raise AxiomViolation("extended cyclic group must fix exactly the X point")
    return out, cbar
