"""Permutations on {0..v-1} and finitely generated permutation groups."""
from __future__ import annotations

import numpy as np

DEFAULT_CLOSURE_CAP = 10_000_000


class CycleParseError(ValueError):
    """Malformed cycle notation or out-of-range point labels."""


class ClosureCapExceeded(RuntimeError):
    """Group closure grew past the requested element cap."""


class Permutation:
    """A bijection of {0..v-1}; images[x] is the image of x."""

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(int(x) for x in images)
        n = len(images)
        seen = [False] * n
        for x in images:
            if not 0 <= x < n or seen[x]:
                raise ValueError(f"images {images!r} is not a bijection on 0..{n - 1}")
            seen[x] = True
        self.images = images

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, degree: int) -> Permutation:
        return cls(range(degree))

    @classmethod
    def from_cycles(cls, text: str, degree: int) -> Permutation:
        """Parse a product of disjoint cycles, e.g. "(0,1)(2,3)".

        Whitespace is ignored, fixed points may be written as singleton
        cycles or omitted, and "()" denotes the identity.
        """
        return cls(parse_cycle_images(text, degree))

    def __getitem__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def is_identity(self) -> bool:
        return all(i == x for x, i in enumerate(self.images))

    def inverse(self) -> Permutation:
        inv = [0] * self.degree
        for x, y in enumerate(self.images):
            inv[y] = x
        return Permutation(inv)

    def apply_to_subset(self, subset) -> tuple[int, ...]:
        return tuple(sorted(self.images[x] for x in subset))

    def cycles(self, include_fixed: bool = False) -> list[tuple[int, ...]]:
        out = []
        seen = [False] * self.degree
        for start in range(self.degree):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            x = self.images[start]
            while x != start:
                cyc.append(x)
                seen[x] = True
                x = self.images[x]
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return out

    def __repr__(self) -> str:
        body = "".join("(" + ",".join(map(str, c)) + ")" for c in self.cycles())
        return body or "()"

    def order(self) -> int:
        n = 1
        for c in self.cycles():
            n = np.lcm(n, len(c))
        return int(n)

    def as_array(self) -> np.ndarray:
        return np.array(self.images, dtype=np.int64)


def parse_cycle_images(text: str, degree: int) -> list[int]:
    """Cycle-notation parser returning the image list."""
    if degree <= 0:
        raise CycleParseError("degree must be positive")
    images = list(range(degree))
    seen: set[int] = set()
    s = text.strip()
    pos = 0
    found_any = False
    while pos < len(s):
        if s[pos].isspace():
            pos += 1
            continue
        if s[pos] != "(":
            raise CycleParseError(f"expected '(' at position {pos} in {text!r}")
        end = s.find(")", pos)
        if end < 0:
            raise CycleParseError(f"unbalanced '(' in {text!r}")
        body = s[pos + 1 : end].strip()
        pos = end + 1
        found_any = True
        if not body:
            continue
        points = []
        for tok in body.split(","):
            tok = tok.strip()
            if not tok.isdigit():
                raise CycleParseError(f"bad point label {tok!r} in {text!r}")
            points.append(int(tok))
        for p in points:
            if p >= degree:
                raise CycleParseError(f"point {p} >= degree {degree}")
            if p in seen:
                raise CycleParseError(f"point {p} repeated in {text!r}")
            seen.add(p)
        for i, p in enumerate(points):
            images[p] = points[(i + 1) % len(points)]
    if not found_any and s:
        raise CycleParseError(f"no cycles found in {text!r}")
    return images


def parse_cycle_notation(text: str, degree: int) -> Permutation:
    return Permutation.from_cycles(text, degree)


def compose(g: Permutation, h: Permutation) -> Permutation:
    """Apply g first, then h: result[x] = h[g[x]]."""
    if g.degree != h.degree:
        raise ValueError(f"degree mismatch: {g.degree} != {h.degree}")
    hi = h.images
    return Permutation(hi[x] for x in g.images)


def inverse(g: Permutation) -> Permutation:
    return g.inverse()


def apply_to_subset(g: Permutation, subset) -> tuple[int, ...]:
    return g.apply_to_subset(subset)


class PermGroup:
    """A permutation group given by a nonempty list of generators."""

    def __init__(self, generators):
        gens = tuple(generators)
        if not gens:
            raise ValueError("a group needs at least one generator")
        degree = gens[0].degree
        for g in gens:
            if g.degree != degree:
                raise ValueError("all generators must share the same degree")
        self.generators = gens
        self.degree = degree
        self._elements: list[Permutation] | None = None

    @classmethod
    def from_cycles(cls, texts, degree: int) -> PermGroup:
        return cls([Permutation.from_cycles(t, degree) for t in texts])

    @classmethod
    def loads(cls, text: str) -> PermGroup:
        """Parse the group file format.

        Line 1 is ``degree v``; each following nonempty line is one
        permutation in cycle notation; ``#`` starts a comment.
        """
        lines = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if line:
                lines.append(line)
        if not lines:
            raise ValueError("empty group file")
        head = lines[0].split()
        if len(head) != 2 or head[0] != "degree" or not head[1].isdigit():
            raise ValueError(f"first line must be 'degree v', got {lines[0]!r}")
        degree = int(head[1])
        if len(lines) < 2:
            raise ValueError("group file lists no generators")
        return cls.from_cycles(lines[1:], degree)

    @classmethod
    def from_file(cls, path) -> PermGroup:
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

    def elements(self, cap: int = DEFAULT_CLOSURE_CAP) -> list[Permutation]:
        """All group elements by breadth-first closure of the generators."""
        if cap < 1:
            raise ValueError("cap must be >= 1")
        if self._elements is None or len(self._elements) > cap:
            ident = tuple(range(self.degree))
            seen = {ident}
            order = [ident]
            frontier = [ident]
            gen_images = [g.images for g in self.generators]
            while frontier:
                fresh = []
                for e in frontier:
                    for gi in gen_images:
                        p = tuple(gi[x] for x in e)
                        if p not in seen:
                            if len(seen) >= cap:
                                raise ClosureCapExceeded(
                                    f"group closure exceeds cap {cap}"
                                )
                            seen.add(p)
                            order.append(p)
                            fresh.append(p)
                frontier = fresh
            self._elements = [Permutation(e) for e in order]
        return self._elements

    def order(self, cap: int = DEFAULT_CLOSURE_CAP) -> int:
        return len(self.elements(cap))

    def point_orbit(self, x: int) -> set[int]:
        seen = {x}
        frontier = [x]
        while frontier:
            fresh = []
            for p in frontier:
                for g in self.generators:
                    q = g.images[p]
                    if q not in seen:
                        seen.add(q)
                        fresh.append(q)
            frontier = fresh
        return seen

    def is_transitive(self) -> bool:
        return len(self.point_orbit(0)) == self.degree

    def subset_orbit(self, subset) -> set[tuple[int, ...]]:
        start = tuple(sorted(subset))
        seen = {start}
        frontier = [start]
        while frontier:
            fresh = []
            for s in frontier:
                for g in self.generators:
                    t = g.apply_to_subset(s)
                    if t not in seen:
                        seen.add(t)
                        fresh.append(t)
            frontier = fresh
        return seen

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, ngens={len(self.generators)})"


def closure_order(group: PermGroup, cap: int = DEFAULT_CLOSURE_CAP) -> int:
    return group.order(cap)
