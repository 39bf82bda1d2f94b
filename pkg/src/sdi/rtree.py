"""Bounding-box tree (R-tree style) over lon/lat rectangles.

Boxes are (west, south, east, north) tuples in degrees. All predicates use
closed-set semantics: boundary touching counts as intersecting and a box is
within itself. Incremental inserts use least-enlargement leaf choice with
quadratic splits; reindexing uses sort-tile-recursive bulk loading. Deletion
shrinks ancestor rectangles but does not rebalance, which keeps queries exact
at the cost of some slack until the next bulk load.
"""

from __future__ import annotations

import math
from typing import Hashable, Iterable, Iterator

Box = tuple[float, float, float, float]


def boxes_intersect(a: Box, b: Box) -> bool:
    return a[0] <= b[2] and b[0] <= a[2] and a[1] <= b[3] and b[1] <= a[3]


def box_within(inner: Box, outer: Box) -> bool:
    return (
        outer[0] <= inner[0]
        and inner[2] <= outer[2]
        and outer[1] <= inner[1]
        and inner[3] <= outer[3]
    )


def _union(a: Box, b: Box) -> Box:
    return (min(a[0], b[0]), min(a[1], b[1]), max(a[2], b[2]), max(a[3], b[3]))


def _area(box: Box) -> float:
    return (box[2] - box[0]) * (box[3] - box[1])


def _enlargement(box: Box, extra: Box) -> float:
    return _area(_union(box, extra)) - _area(box)


class _Node:
    __slots__ = ("leaf", "boxes", "children")

    def __init__(self, leaf: bool):
        self.leaf = leaf
        self.boxes: list[Box] = []
        # Leaf children are caller keys; internal children are _Node.
        self.children: list = []

    def mbr(self) -> Box:
        box = self.boxes[0]
        for other in self.boxes[1:]:
            box = _union(box, other)
        return box


class BoxTree:
    """Spatial index mapping hashable keys to boxes. One box per key."""

    def __init__(self, max_entries: int = 16):
        if max_entries < 4:
            raise ValueError("max_entries must be at least 4")
        self._max = max_entries
        self._min = max(2, max_entries * 2 // 5)
        self._root = _Node(leaf=True)
        self._boxes: dict[Hashable, Box] = {}

    def __len__(self) -> int:
        return len(self._boxes)

    def __contains__(self, key: Hashable) -> bool:
        return key in self._boxes

    def box_of(self, key: Hashable) -> Box | None:
        return self._boxes.get(key)

    # -- mutation ---------------------------------------------------------

    def insert(self, key: Hashable, box: Box) -> None:
        if key in self._boxes:
            self.remove(key)
        box = tuple(float(v) for v in box)  # type: ignore[assignment]
        self._boxes[key] = box
        split = self._insert(self._root, key, box)
        if split is not None:
            old_root = self._root
            self._root = _Node(leaf=False)
            self._root.boxes = [old_root.mbr(), split.mbr()]
            self._root.children = [old_root, split]

    def remove(self, key: Hashable) -> bool:
        box = self._boxes.pop(key, None)
        if box is None:
            return False
        removed = self._remove(self._root, key, box)
        # Collapse a single-child internal root so height can shrink.
        while not self._root.leaf and len(self._root.children) == 1:
            self._root = self._root.children[0]
        if not self._root.leaf and not self._root.children:
            self._root = _Node(leaf=True)
        return removed

    def bulk_load(self, items: Iterable[tuple[Hashable, Box]]) -> None:
        """Rebuild the whole tree with sort-tile-recursive packing."""
        entries = [(key, tuple(float(v) for v in box)) for key, box in items]
        self._boxes = {key: box for key, box in entries}
        if len(self._boxes) != len(entries):
            raise ValueError("duplicate keys in bulk load")
        if not entries:
            self._root = _Node(leaf=True)
            return

        leaf_count = math.ceil(len(entries) / self._max)
        slice_count = math.ceil(math.sqrt(leaf_count))
        per_slice = math.ceil(len(entries) / slice_count)
        entries.sort(key=lambda e: (e[1][0] + e[1][2], e[1][1] + e[1][3]))

        leaves = []
        for i in range(0, len(entries), per_slice):
            strip = entries[i : i + per_slice]
            strip.sort(key=lambda e: (e[1][1] + e[1][3], e[1][0] + e[1][2]))
            for j in range(0, len(strip), self._max):
                node = _Node(leaf=True)
                for key, box in strip[j : j + self._max]:
                    node.children.append(key)
                    node.boxes.append(box)
                leaves.append(node)

        level = leaves
        while len(level) > 1:
            parents = []
            for i in range(0, len(level), self._max):
                node = _Node(leaf=False)
                for child in level[i : i + self._max]:
                    node.children.append(child)
                    node.boxes.append(child.mbr())
                parents.append(node)
            level = parents
        self._root = level[0]

    # -- queries ----------------------------------------------------------

    def search_intersects(self, box: Box) -> set:
        out: set = set()
        self._collect(self._root, box, boxes_intersect, out)
        return out

    def search_within(self, box: Box) -> set:
        out: set = set()
        self._collect(self._root, box, lambda entry, query: box_within(entry, query), out)
        return out

    def items(self) -> Iterator[tuple[Hashable, Box]]:
        """Walk actual tree leaves (not the key registry); used by audits."""
        stack = [self._root]
        while stack:
            node = stack.pop()
            if node.leaf:
                yield from zip(node.children, node.boxes)
            else:
                stack.extend(node.children)

    # -- internals --------------------------------------------------------

    def _collect(self, node: _Node, query: Box, predicate, out: set) -> None:
        if node.leaf:
            for key, box in zip(node.children, node.boxes):
                if predicate(box, query):
                    out.add(key)
            return
        for child, box in zip(node.children, node.boxes):
            # Any entry satisfying either predicate lies inside its node MBR,
            # so an MBR disjoint from the query can be pruned for both.
            if boxes_intersect(box, query):
                self._collect(child, query, predicate, out)

    def _insert(self, node: _Node, key: Hashable, box: Box) -> _Node | None:
        if node.leaf:
            node.children.append(key)
            node.boxes.append(box)
        else:
            index = self._choose_child(node, box)
            split = self._insert(node.children[index], key, box)
            node.boxes[index] = _union(node.boxes[index], box)
            if split is not None:
                node.children.append(split)
                node.boxes.append(split.mbr())
        if len(node.children) > self._max:
            return self._split(node)
        return None

    def _choose_child(self, node: _Node, box: Box) -> int:
        best = 0
        best_key = None
        for i, child_box in enumerate(node.boxes):
            key = (_enlargement(child_box, box), _area(child_box))
            if best_key is None or key < best_key:
                best_key = key
                best = i
        return best

    def _split(self, node: _Node) -> _Node:
        """Quadratic split; `node` keeps one group, the returned node gets the other."""
        boxes = node.boxes
        children = node.children

        worst = -math.inf
        seeds = (0, 1)
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                waste = _area(_union(boxes[i], boxes[j])) - _area(boxes[i]) - _area(boxes[j])
                if waste > worst:
                    worst = waste
                    seeds = (i, j)

        remaining = [k for k in range(len(boxes)) if k not in seeds]
        group_a = [seeds[0]]
        group_b = [seeds[1]]
        mbr_a = boxes[seeds[0]]
        mbr_b = boxes[seeds[1]]

        while remaining:
            # Force assignment if one group must absorb the rest to reach min fill.
            if len(group_a) + len(remaining) <= self._min:
                target_a = True
            elif len(group_b) + len(remaining) <= self._min:
                target_a = False
            else:
                best_index = 0
                best_diff = -1.0
                for pos, k in enumerate(remaining):
                    diff = abs(_enlargement(mbr_a, boxes[k]) - _enlargement(mbr_b, boxes[k]))
                    if diff > best_diff:
                        best_diff = diff
                        best_index = pos
                k = remaining[best_index]
                grow_a = _enlargement(mbr_a, boxes[k])
                grow_b = _enlargement(mbr_b, boxes[k])
                if grow_a != grow_b:
                    target_a = grow_a < grow_b
                elif _area(mbr_a) != _area(mbr_b):
                    target_a = _area(mbr_a) < _area(mbr_b)
                else:
                    target_a = len(group_a) <= len(group_b)
                remaining.pop(best_index)
                if target_a:
                    group_a.append(k)
                    mbr_a = _union(mbr_a, boxes[k])
                else:
                    group_b.append(k)
                    mbr_b = _union(mbr_b, boxes[k])
                continue
            k = remaining.pop(0)
            if target_a:
                group_a.append(k)
                mbr_a = _union(mbr_a, boxes[k])
            else:
                group_b.append(k)
                mbr_b = _union(mbr_b, boxes[k])

        sibling = _Node(leaf=node.leaf)
        sibling.boxes = [boxes[k] for k in group_b]
        sibling.children = [children[k] for k in group_b]
        node.boxes = [boxes[k] for k in group_a]
        node.children = [children[k] for k in group_a]
        return sibling

    def _remove(self, node: _Node, key: Hashable, box: Box) -> bool:
        if node.leaf:
            for i, child in enumerate(node.children):
                if child == key:
                    node.children.pop(i)
                    node.boxes.pop(i)
                    return True
            return False
        for i, (child, child_box) in enumerate(zip(node.children, node.boxes)):
            if boxes_intersect(child_box, box) and self._remove(child, key, box):
                if not child.children:
                    node.children.pop(i)
                    node.boxes.pop(i)
                else:
                    node.boxes[i] = child.mbr()
                return True
        return False
