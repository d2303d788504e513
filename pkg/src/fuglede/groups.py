"""Finite abelian groups as products of cyclic factors.

Elements are plain tuples of residues. A group with a single factor models
``Z_n``; most callers working with cyclic groups can pass bare integers,
which are normalized to 1-tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, reduce
from itertools import product
from typing import Iterable, Iterator, Mapping

from sympy import divisors

Element = tuple[int, ...]


@dataclass(frozen=True)
class Group:
    orders: tuple[int, ...]

    def __post_init__(self):
        if not self.orders:
            raise ValueError("a group needs at least one cyclic factor")
        if any(not isinstance(n, int) or n < 2 for n in self.orders):
            raise ValueError(f"cyclic factor orders must be integers >= 2, got {self.orders}")

    @cached_property
    def size(self) -> int:
        return math.prod(self.orders)

    @cached_property
    def exponent(self) -> int:
        return reduce(math.lcm, self.orders, 1)

    @cached_property
    def divisor_lattice(self) -> list[int]:
        """Divisors of the exponent, ascending."""
        return [int(d) for d in divisors(self.exponent)]

    @property
    def is_cyclic_factor(self) -> bool:
        """True when the group is given by a single factor (the Z_n setting)."""
        return len(self.orders) == 1

    @property
    def rank(self) -> int:
        return len(self.orders)

    def require_cyclic(self) -> int:
        if not self.is_cyclic_factor:
            raise ValueError(f"operation needs a single-factor cyclic group, got {self.orders}")
        return self.orders[0]

    def element(self, x) -> Element:
        if isinstance(x, int):
            if not self.is_cyclic_factor:
                raise ValueError("bare integers are only elements of single-factor groups")
            return (x % self.orders[0],)
        coords = tuple(x)
        if len(coords) != self.rank:
            raise ValueError(f"element {coords} has wrong dimension for {self.orders}")
        return tuple(int(c) % n for c, n in zip(coords, self.orders))

    @property
    def zero(self) -> Element:
        return (0,) * self.rank

    def add(self, x: Element, y: Element) -> Element:
        return tuple((a + b) % n for a, b, n in zip(x, y, self.orders))

    def sub(self, x: Element, y: Element) -> Element:
        return tuple((a - b) % n for a, b, n in zip(x, y, self.orders))

    def neg(self, x: Element) -> Element:
        return tuple(-a % n for a, n in zip(x, self.orders))

    def scale(self, k: int, x: Element) -> Element:
        return tuple(k * a % n for a, n in zip(x, self.orders))

    def elements(self) -> Iterator[Element]:
        """All elements in lexicographic order."""
        return product(*(range(n) for n in self.orders))

    def __contains__(self, x) -> bool:
        try:
            coords = tuple(x)
        except TypeError:
            return False
        return len(coords) == self.rank and all(
            isinstance(c, int) and 0 <= c < n for c, n in zip(coords, self.orders))

    def __str__(self):
        return " x ".join(f"Z_{n}" for n in self.orders)


def make_group(orders: Iterable[int] | int) -> Group:
    if isinstance(orders, int):
        orders = [orders]
    return Group(tuple(int(n) for n in orders))


def element_order(g: Group, x) -> int:
    x = g.element(x)
    return reduce(math.lcm, (n // math.gcd(a, n) for a, n in zip(x, g.orders)), 1)


@dataclass(frozen=True)
class Subgroup:
    group: Group
    generators: tuple[Element, ...]
    members: tuple[Element, ...]

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def index(self) -> int:
        return self.group.size // self.order

    def __contains__(self, x) -> bool:
        return self.group.element(x) in self._member_set

    @cached_property
    def _member_set(self) -> frozenset[Element]:
        return frozenset(self.members)


def generated_subgroup(g: Group, gens: Iterable) -> Subgroup:
    gens = tuple(sorted({g.element(x) for x in gens}))
    seen = {g.zero}
    frontier = [g.zero]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = g.add(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return Subgroup(g, gens, tuple(sorted(seen)))


def cyclic_subgroup(n: int, order: int) -> list[int]:
    """The unique subgroup of Z_n of the given order, as sorted integers."""
    if n % order:
        raise ValueError(f"{order} does not divide {n}")
    step = n // order
    return list(range(0, n, step))


@dataclass(frozen=True)
class WeightedSet:
    """Integer-weighted multiset over a group; zero weights are dropped."""

    group: Group
    weights: Mapping[Element, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for x, w in dict(self.weights).items():
            x = self.group.element(x)
            if w:
                clean[x] = clean.get(x, 0) + int(w)
        object.__setattr__(self, "weights", {x: w for x, w in sorted(clean.items()) if w})

    @classmethod
    def from_elements(cls, group: Group, elements: Iterable) -> "WeightedSet":
        w: dict[Element, int] = {}
        for x in elements:
            x = group.element(x)
            w[x] = w.get(x, 0) + 1
        return cls(group, w)

    @classmethod
    def from_ints(cls, n: int, elements: Iterable[int]) -> "WeightedSet":
        return cls.from_elements(make_group([n]), elements)

    def __hash__(self):
        return hash((self.group, tuple(self.weights.items())))

    def __eq__(self, other):
        return (isinstance(other, WeightedSet) and self.group == other.group
                and self.weights == other.weights)

    def __len__(self):
        return self.total

    def __iter__(self):
        return iter(self.weights)

    def __contains__(self, x):
        return self.group.element(x) in self.weights

    def weight(self, x) -> int:
        return self.weights.get(self.group.element(x), 0)

    @property
    def total(self) -> int:
        return sum(self.weights.values())

    @property
    def is_set(self) -> bool:
        return all(w == 1 for w in self.weights.values())

    @property
    def support(self) -> list[Element]:
        return list(self.weights)

    def ints(self) -> list[int]:
        """Support of a cyclic-group set as sorted integers."""
        self.group.require_cyclic()
        return [x[0] for x in self.weights]

    def translate(self, g) -> "WeightedSet":
        g = self.group.element(g)
        return WeightedSet(self.group, {self.group.add(x, g): w for x, w in self.weights.items()})

    def dilate(self, u: int) -> "WeightedSet":
        out: dict[Element, int] = {}
        for x, w in self.weights.items():
            y = self.group.scale(u, x)
            out[y] = out.get(y, 0) + w
        return WeightedSet(self.group, out)

    def __repr__(self):
        if self.group.is_cyclic_factor:
            body = {x[0]: w for x, w in self.weights.items()}
        else:
            body = self.weights
        return f"WeightedSet({self.group}, {body})"


def project(g: Group, m: int, W: WeightedSet) -> WeightedSet:
    """Push a weighted set on Z_n forward along the quotient map Z_n -> Z_m."""
    n = g.require_cyclic()
    if m < 1 or n % m:
        raise ValueError(f"{m} does not divide {n}")
    target = make_group([m]) if m >= 2 else None
    if target is None:
        raise ValueError("projection target must have order >= 2")
    out: dict[Element, int] = {}
    for (x,), w in W.weights.items():
        y = (x % m,)
        out[y] = out.get(y, 0) + w
    return WeightedSet(target, out)


def projection_counts(n: int, m: int, elements: Iterable[int]) -> list[int]:
    """Multiplicity vector of the projection Z_n -> Z_m (works for m = 1)."""
    if n % m:
        raise ValueError(f"{m} does not divide {n}")
    counts = [0] * m
    for x in elements:
        counts[x % m] += 1
    return counts


def contained_in_proper_subgroup(S: WeightedSet) -> Subgroup | None:
    """Subgroup generated by S - s0, returned only when it is proper."""
    g = S.group
    pts = S.support
    if not pts:
        return generated_subgroup(g, [])
    base = pts[0]
    H = generated_subgroup(g, [g.sub(x, base) for x in pts])
    return H if H.order < g.size else None


def cyclic_generated_order(n: int, elements: Iterable[int]) -> int:
    """Order of the subgroup of Z_n generated by the differences of a set."""
    elements = list(elements)
    if not elements:
        return 1
    base = elements[0]
    gcd = n
    for x in elements:
        gcd = math.gcd(gcd, (x - base) % n)
    return n // gcd


def crt_isomorphism(orders: Iterable[int]):
    """Mutually inverse maps between Z_N and a product of coprime cyclic factors.

    Returns ``(to_product, to_cyclic)`` acting on WeightedSets.
    """
    orders = tuple(orders)
    N = math.prod(orders)
    for i, a in enumerate(orders):
        for b in orders[i + 1:]:
            if math.gcd(a, b) != 1:
                raise ValueError(f"factors {orders} are not pairwise coprime")
    cyc = make_group([N])
    prod_g = make_group(orders)
    coeffs = [(N // a) * pow(N // a, -1, a) % N for a in orders]

    def to_product(W: WeightedSet) -> WeightedSet:
        if W.group != cyc:
            raise ValueError("input must live on the cyclic group")
        return WeightedSet(prod_g, {tuple(x[0] % a for a in orders): w for x, w in W.weights.items()})

    def to_cyclic(W: WeightedSet) -> WeightedSet:
        if W.group != prod_g:
            raise ValueError("input must live on the product group")
        return WeightedSet(cyc, {(sum(c * e for c, e in zip(coeffs, x)) % N,): w
                                 for x, w in W.weights.items()})

    return to_product, to_cyclic


def parse_set_json(obj: Mapping) -> WeightedSet:
    """Read ``{"group": [...], "set": [...]}``; bare integers allowed for Z_n.

    An optional ``"weights"`` list parallel to ``"set"`` gives multiplicities.
    """
    if "group" not in obj or "set" not in obj:
        raise ValueError("set description needs 'group' and 'set' keys")
    g = make_group(obj["group"])
    elems = [g.element(x) for x in obj["set"]]
    weights = obj.get("weights")
    if weights is None:
        return WeightedSet.from_elements(g, elems)
    if len(weights) != len(elems):
        raise ValueError("'weights' must be parallel to 'set'")
    out: dict[Element, int] = {}
    for x, w in zip(elems, weights):
        out[x] = out.get(x, 0) + int(w)
    return WeightedSet(g, out)


def set_to_json(S: WeightedSet) -> dict:
    g = S.group
    if g.is_cyclic_factor:
        elems: list = [x[0] for x in S.weights]
    else:
        elems = [list(x) for x in S.weights]
    out = {"group": list(g.orders), "set": elems}
    if not S.is_set:
        out["weights"] = list(S.weights.values())
    return out
