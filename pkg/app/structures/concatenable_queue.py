"""
Concatenable queue over x-sorted points
- Join-based AVL tree with subtree sizes (rank queries, O(log n) indexing)
- split by x and join of x-separated queues in O(log n)
- Every element carries a bit mask labelling the edge to its successor; subtree
  masks are OR-aggregated so the leftmost flagged edge is found in O(log n)
"""

from typing import Callable, Iterator, List, Optional, Sequence, Tuple

from app.exceptions import StructureError
from app.geometry.primitives import Point

Labeler = Callable[[Point, Optional[Point]], int]


class _QNode:
    __slots__ = ("point", "left", "right", "height", "size", "mask", "agg")

    def __init__(self, point: Point, mask: int = 0):
        self.point = point
        self.left: Optional["_QNode"] = None
        self.right: Optional["_QNode"] = None
        self.height = 1
        self.size = 1
        self.mask = mask
        self.agg = mask


def _height(n: Optional[_QNode]) -> int:
    return n.height if n else 0


def _size(n: Optional[_QNode]) -> int:
    return n.size if n else 0


def _agg(n: Optional[_QNode]) -> int:
    return n.agg if n else 0


def _update(n: _QNode) -> _QNode:
    n.height = 1 + max(_height(n.left), _height(n.right))
    n.size = 1 + _size(n.left) + _size(n.right)
    n.agg = n.mask | _agg(n.left) | _agg(n.right)
    return n


def _rotate_left(n: _QNode) -> _QNode:
    r = n.right
    n.right = r.left
    r.left = _update(n)
    return _update(r)


def _rotate_right(n: _QNode) -> _QNode:
    l = n.left
    n.left = l.right
    l.right = _update(n)
    return _update(l)


def _balance(n: _QNode) -> _QNode:
    _update(n)
    diff = _height(n.left) - _height(n.right)
    if diff > 1:
        if _height(n.left.left) < _height(n.left.right):
            n.left = _rotate_left(n.left)
        return _rotate_right(n)
    if diff < -1:
        if _height(n.right.right) < _height(n.right.left):
            n.right = _rotate_right(n.right)
        return _rotate_left(n)
    return n


def _join_with(left: Optional[_QNode], mid: _QNode, right: Optional[_QNode]) -> _QNode:
    """All of left < mid < right"""
    if abs(_height(left) - _height(right)) <= 1:
        mid.left, mid.right = left, right
        return _update(mid)
    if _height(left) > _height(right):
        left.right = _join_with(left.right, mid, right)
        return _balance(left)
    right.left = _join_with(left, mid, right.left)
    return _balance(right)


def _pop_min(n: _QNode) -> Tuple[_QNode, Optional[_QNode]]:
    if n.left is None:
        rest = n.right
        n.right = None
        return _update(n), rest
    smallest, n.left = _pop_min(n.left)
    return smallest, _balance(n)


def _join(left: Optional[_QNode], right: Optional[_QNode]) -> Optional[_QNode]:
    if left is None:
        return right
    if right is None:
        return left
    mid, rest = _pop_min(right)
    return _join_with(left, mid, rest)


def _split(n: Optional[_QNode], x, left_inclusive: bool) -> Tuple[Optional[_QNode], Optional[_QNode]]:
    if n is None:
        return None, None
    goes_left = n.point.x < x or (left_inclusive and n.point.x == x)
    left, right = n.left, n.right
    if goes_left:
        lo, hi = _split(right, x, left_inclusive)
        return _join_with(left, n, lo), hi
    lo, hi = _split(left, x, left_inclusive)
    return lo, _join_with(hi, n, right)


def _set_mask(n: _QNode, x, mask: int) -> None:
    path = []
    while n is not None and n.point.x != x:
        path.append(n)
        n = n.left if x < n.point.x else n.right
    if n is None:
        raise StructureError(f"no element at x={x}")
    n.mask = mask
    _update(n)
    for node in reversed(path):
        _update(node)


def _build(points: Sequence[Point], masks: Sequence[int], lo: int, hi: int) -> Optional[_QNode]:
    if lo >= hi:
        return None
    mid = (lo + hi) // 2
    node = _QNode(points[mid], masks[mid])
    node.left = _build(points, masks, lo, mid)
    node.right = _build(points, masks, mid + 1, hi)
    return _update(node)


class ConcatenableQueue(Sequence):
    """
    Sequence of points with strictly increasing x. Join and split consume their
    inputs; only the returned queues stay valid.
    """

    def __init__(self, labeler: Optional[Labeler] = None, root: Optional[_QNode] = None):
        self.labeler = labeler
        self._root = root

    @classmethod
    def from_points(cls, points: Sequence[Point], labeler: Optional[Labeler] = None) -> "ConcatenableQueue":
        points = list(points)
        for a, b in zip(points, points[1:]):
            if not a.x < b.x:
                raise StructureError("queue points must have strictly increasing x")
        succ = points[1:] + [None]
        masks = [labeler(p, q) if labeler else 0 for p, q in zip(points, succ)]
        return cls(labeler, _build(points, masks, 0, len(points)))

    # ---- sequence protocol ----

    def __len__(self) -> int:
        return _size(self._root)

    def __bool__(self) -> bool:
        return self._root is not None

    def __getitem__(self, index: int) -> Point:
        size = len(self)
        if index < 0:
            index += size
        if not 0 <= index < size:
            raise IndexError("queue index out of range")
        n = self._root
        while True:
            left = _size(n.left)
            if index < left:
                n = n.left
            elif index == left:
                return n.point
            else:
                index -= left + 1
                n = n.right

    def __iter__(self) -> Iterator[Point]:
        stack: List[_QNode] = []
        n = self._root
        while stack or n is not None:
            while n is not None:
                stack.append(n)
                n = n.left
            n = stack.pop()
            yield n.point
            n = n.right

    def first(self) -> Optional[Point]:
        return self[0] if self._root else None

    def last(self) -> Optional[Point]:
        return self[-1] if self._root else None

    # ---- queries ----

    def index_of(self, point: Point) -> int:
        """Rank of the element with point's x; StructureError when absent"""
        n, rank = self._root, 0
        while n is not None:
            if point.x < n.point.x:
                n = n.left
            elif point.x > n.point.x:
                rank += _size(n.left) + 1
                n = n.right
            else:
                if n.point != point:
                    break
                return rank + _size(n.left)
        raise StructureError(f"{point} is not in the queue")

    def __contains__(self, point) -> bool:
        try:
            self.index_of(point)
            return True
        except StructureError:
            return False

    def bisect_left_x(self, x) -> int:
        """Number of elements with abscissa < x"""
        n, rank = self._root, 0
        while n is not None:
            if n.point.x < x:
                rank += _size(n.left) + 1
                n = n.right
            else:
                n = n.left
        return rank

    def successor(self, point: Point) -> Optional[Point]:
        i = self.index_of(point)
        return self[i + 1] if i + 1 < len(self) else None

    def predecessor(self, point: Point) -> Optional[Point]:
        i = self.index_of(point)
        return self[i - 1] if i > 0 else None

    def mask_of(self, point: Point) -> int:
        n = self._root
        while n is not None and n.point.x != point.x:
            n = n.left if point.x < n.point.x else n.right
        if n is None:
            raise StructureError(f"{point} is not in the queue")
        return n.mask

    def leftmost_flagged(self, bit: int) -> Optional[Tuple[int, Point]]:
        """(rank, point) of the leftmost element whose mask has the bit"""
        n, rank = self._root, 0
        if not _agg(n) & bit:
            return None
        while n is not None:
            if _agg(n.left) & bit:
                n = n.left
            elif n.mask & bit:
                return rank + _size(n.left), n.point
            else:
                rank += _size(n.left) + 1
                n = n.right
        return None

    # ---- updates ----

    def _relabel_last(self, successor: Optional[Point]) -> None:
        if self._root is None:
            return
        last = self.last()
        mask = self.labeler(last, successor) if self.labeler else 0
        _set_mask(self._root, last.x, mask)

    def relabel(self, point: Point) -> None:
        """Recompute the mask of one element from its current successor"""
        if self.labeler is None:
            return
        _set_mask(self._root, point.x, self.labeler(point, self.successor(point)))

    def join(self, other: "ConcatenableQueue") -> "ConcatenableQueue":
        """self followed by other; every x in self must be smaller than every x in other"""
        if self._root and other._root and not self.last().x < other.first().x:
            raise StructureError("joined queues are not x-separated")
        labeler = self.labeler or other.labeler
        self.labeler = labeler
        self._relabel_last(other.first())
        root = _join(self._root, other._root)
        self._root = other._root = None
        return ConcatenableQueue(labeler, root)

    def split(self, x, left_inclusive: bool = True) -> Tuple["ConcatenableQueue", "ConcatenableQueue"]:
        """(elements with abscissa <= x, the rest); with left_inclusive=False the left part is < x"""
        lo, hi = _split(self._root, x, left_inclusive)
        self._root = None
        left = ConcatenableQueue(self.labeler, lo)
        left._relabel_last(None)
        return left, ConcatenableQueue(self.labeler, hi)

    def to_list(self) -> List[Point]:
        return list(iter(self))

    def __repr__(self) -> str:
        return f"ConcatenableQueue({len(self)} points)"


__all__ = ["ConcatenableQueue", "Labeler"]
