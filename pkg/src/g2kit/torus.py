"""Finite affine isometry groups of T^c x R^l and their fixed-point geometry.

Coordinates are 1-based.  A subset of coordinates may be declared as "line"
(noncompact R-factor) coordinates; the rest are circle coordinates of a torus.
All arithmetic is exact: integer matrices for the linear parts, rationals for
shifts, Smith normal form for the fixed-point congruences.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import lcm
from typing import Iterable, Sequence

from .betti import BettiVector
from .errors import (
    GroupTooLarge,
    InvalidOperand,
    NotAntiInvolution,
    NotEquivariant,
    PullObstruction,
)
from .exact import (
    det,
    frac,
    in_span_mod_lattice,
    inverse,
    mat_vec,
    null_space,
    rref,
    smith_normal_form,
    solve_integer,
)
from .forms import ExteriorForm, LinearMapR, pullback

GROUP_SIZE_BOUND = 1024


def _mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


class AffineTorusMap:
    """Affine map x -> Ax + v of T^c x R^l, with A in GL(n, Z).

    A must not mix circle and line coordinates, and must act on each line
    coordinate as +-1.  Shifts are canonicalized mod 1 on circle coordinates.
    The optional name is bookkeeping only and does not enter equality.
    """

    __slots__ = ("n", "lines", "linear", "shift", "name", "_key")

    def __init__(self, linear: Sequence[Sequence[int]], shift: Sequence = None,
                 lines: Iterable[int] = (), name: str = ""):
        rows = tuple(tuple(int(x) for x in row) for row in linear)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise InvalidOperand("linear part must be square")
        if abs(det(rows)) != 1:
            raise InvalidOperand("linear part must be unimodular")
        lines = frozenset(int(i) for i in lines)
        if any(not (1 <= i <= n) for i in lines):
            raise InvalidOperand("line coordinates out of range")
        for i in range(n):
            for j in range(n):
                if rows[i][j] and ((i + 1 in lines) != (j + 1 in lines)):
                    raise InvalidOperand(
                        f"linear part mixes circle and line coordinates at ({i+1},{j+1})")
        for i in lines:
            row = rows[i - 1]
            if row[i - 1] not in (1, -1) or any(row[j] for j in range(n) if j != i - 1):
                raise InvalidOperand(
                    f"line coordinate {i} must carry a plain sign action")
        if shift is None:
            shift = [0] * n
        vals = [frac(x) for x in shift]
        if len(vals) != n:
            raise InvalidOperand("shift length mismatch")
        canon = tuple(v if (i + 1) in lines else _mod1(v) for i, v in enumerate(vals))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "lines", lines)
        object.__setattr__(self, "linear", rows)
        object.__setattr__(self, "shift", canon)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_key", (n, lines, rows, canon))

    def __setattr__(self, name, value):
        raise AttributeError("AffineTorusMap is immutable")

    def __eq__(self, other):
        return isinstance(other, AffineTorusMap) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        label = self.name or "map"
        return f"<AffineTorusMap {label} on T^{self.n - len(self.lines)}" + (
            f" x R^{len(self.lines)}>" if self.lines else ">")

    @property
    def circle_dims(self) -> int:
        return self.n - len(self.lines)

    @property
    def line_dims(self) -> int:
        return len(self.lines)

    @property
    def shift_denominator(self) -> int:
        return lcm(*(s.denominator for s in self.shift)) if self.shift else 1

    def is_identity(self) -> bool:
        ident = all(self.linear[i][j] == (i == j) for i in range(self.n)
                    for j in range(self.n))
        return ident and all(s == 0 for s in self.shift)

    def apply(self, point: Sequence) -> tuple[Fraction, ...]:
        p = [frac(x) for x in point]
        if len(p) != self.n:
            raise InvalidOperand("point dimension mismatch")
        img = [sum(self.linear[i][j] * p[j] for j in range(self.n)) + self.shift[i]
               for i in range(self.n)]
        return tuple(v if (i + 1) in self.lines else _mod1(v)
                     for i, v in enumerate(img))

    def compose(self, other: "AffineTorusMap") -> "AffineTorusMap":
        """self after other."""
        if self.n != other.n or self.lines != other.lines:
            raise InvalidOperand("maps act on different spaces")
        n = self.n
        lin = tuple(tuple(sum(self.linear[i][k] * other.linear[k][j]
                              for k in range(n)) for j in range(n))
                    for i in range(n))
        shf = [sum(self.linear[i][j] * other.shift[j] for j in range(n))
               + self.shift[i] for i in range(n)]
        name = f"{self.name}*{other.name}" if self.name and other.name else ""
        return AffineTorusMap(lin, shf, self.lines, name)

    def inverse(self) -> "AffineTorusMap":
        inv_rows = inverse(self.linear)
        lin = tuple(tuple(int(x) for x in row) for row in inv_rows)
        shf = [-sum(lin[i][j] * self.shift[j] for j in range(self.n))
               for i in range(self.n)]
        name = f"{self.name}^-1" if self.name else ""
        return AffineTorusMap(lin, shf, self.lines, name)

    def order(self, cap: int = 512) -> int:
        cur = self
        for k in range(1, cap + 1):
            if cur.is_identity():
                return k
            cur = cur.compose(self)
        raise GroupTooLarge(f"order exceeds {cap}")

    @staticmethod
    def identity(n: int, lines: Iterable[int] = ()) -> "AffineTorusMap":
        eye = [[int(i == j) for j in range(n)] for i in range(n)]
        return AffineTorusMap(eye, None, lines, "id")

    @staticmethod
    def diagonal(signs: Sequence[int], shift: Sequence = None,
                 lines: Iterable[int] = (), name: str = "") -> "AffineTorusMap":
        n = len(signs)
        lin = [[signs[i] if i == j else 0 for j in range(n)] for i in range(n)]
        return AffineTorusMap(lin, shift, lines, name)


class FiniteActionGroup:
    """Closure of a finite set of commensurable affine torus maps."""

    __slots__ = ("generators", "elements", "_index")

    def __init__(self, generators: Sequence[AffineTorusMap],
                 elements: Sequence[AffineTorusMap]):
        object.__setattr__(self, "generators", tuple(generators))
        object.__setattr__(self, "elements", tuple(elements))
        object.__setattr__(self, "_index", {e: i for i, e in enumerate(elements)})

    def __setattr__(self, name, value):
        raise AttributeError("FiniteActionGroup is immutable")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, f: AffineTorusMap):
        return f in self._index

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> AffineTorusMap:
        return self.elements[0]

    @property
    def n(self) -> int:
        return self.identity.n

    @property
    def lines(self) -> frozenset:
        return self.identity.lines

    @property
    def abelian(self) -> bool:
        gens = self.generators
        return all(commutes(a, b) for a, b in combinations(gens, 2))

    @property
    def exponent(self) -> int:
        return lcm(*(e.order() for e in self.elements))

    def multiplication_table(self) -> dict:
        table = {}
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                table[(i, j)] = self._index[a.compose(b)]
        return table

    def subgroup(self, members: Sequence[AffineTorusMap]) -> "FiniteActionGroup":
        for m in members:
            if m not in self._index:
                raise InvalidOperand("subgroup member not in group")
        return generate_group(members)


def generate_group(gens: Sequence[AffineTorusMap],
                   bound: int = GROUP_SIZE_BOUND) -> FiniteActionGroup:
    """BFS closure of the generators; identity is always element 0."""
    if not gens:
        raise InvalidOperand("need at least one generator (or an identity map)")
    n, lines = gens[0].n, gens[0].lines
    for g in gens:
        if g.n != n or g.lines != lines:
            raise InvalidOperand("generators act on different spaces")
    ident = AffineTorusMap.identity(n, lines)
    seen = {ident: ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for cur in frontier:
            for g in gens:
                prod = cur.compose(g)
                if prod not in seen:
                    if cur.is_identity():
                        word = g.name
                    elif prod.is_identity():
                        word = "id"
                    else:
                        word = (f"{cur.name}*{g.name}"
                                if cur.name and g.name else "")
                    named = AffineTorusMap(prod.linear, prod.shift, lines, word)
                    seen[prod] = named
                    nxt.append(named)
                    if len(seen) > bound:
                        raise GroupTooLarge(
                            f"group did not close within {bound} elements")
        frontier = nxt
    return FiniteActionGroup(gens, tuple(seen.values()))


def commutes(f: AffineTorusMap, g: AffineTorusMap) -> bool:
    return f.compose(g) == g.compose(f)


def check_preserves_form(f: AffineTorusMap, phi: ExteriorForm, sign: int) -> bool:
    """Does the linear part pull the form back to sign * form?"""
    if f.n != phi.dim:
        raise InvalidOperand("dimension mismatch")
    if sign not in (1, -1):
        raise InvalidOperand("sign must be +1 or -1")
    return pullback(LinearMapR(f.linear), phi) == sign * phi


# ---------------------------------------------------------------------------
# fixed sets


class _Component:
    """One connected component of a fixed-point set: an affine subtorus
    (possibly times a line factor), stored with exact offset and integer
    direction vectors."""

    __slots__ = ("n", "lines", "offset", "directions", "free_lines", "_ckey")

    def __init__(self, n, lines, offset, directions, free_lines):
        self.n = n
        self.lines = lines
        self.offset = tuple(offset)
        self.directions = tuple(tuple(d) for d in directions)
        self.free_lines = frozenset(free_lines)
        self._ckey = None

    @property
    def torus_dim(self) -> int:
        return len(self.directions)

    @property
    def line_dim(self) -> int:
        return len(self.free_lines)

    def _circle_indices(self):
        return [i for i in range(self.n) if (i + 1) not in self.lines]

    def display_offset(self) -> tuple[Fraction, ...]:
        return tuple(self.offset[i] if (i + 1) in self.lines else _mod1(self.offset[i])
                     for i in range(self.n))

    def key(self):
        """Canonical hashable key; two components are equal iff keys agree."""
        if self._ckey is not None:
            return self._ckey
        circ = self._circle_indices()
        d_rows = tuple(tuple(d[i] for i in circ) for d in self.directions)
        span = rref(d_rows) if d_rows else ()
        line_vals = tuple(
            (i + 1, self.offset[i]) for i in range(self.n)
            if (i + 1) in self.lines and (i + 1) not in self.free_lines)
        off_c = [_mod1(self.offset[i]) for i in circ]
        if not d_rows:
            reduced = tuple(off_c)
        else:
            reduced = _reduce_offset(d_rows, off_c)
        self._ckey = (self.n, self.lines, self.free_lines, span, line_vals, reduced)
        return self._ckey

    def __eq__(self, other):
        return isinstance(other, _Component) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


@lru_cache(maxsize=256)
def _quotient_lattice_data(ann):
    """For an annihilator matrix (rows), integer SNF data of its image lattice."""
    denom = 1
    for row in ann:
        for x in row:
            denom = lcm(denom, x.denominator)
    a_int = tuple(tuple(int(x * denom) for x in row) for row in ann)
    u, d, v = smith_normal_form(a_int)
    diag = tuple(d[i][i] for i in range(len(a_int)))
    uinv = tuple(tuple(int(x) for x in row) for row in inverse(u))
    return denom, u, diag, uinv


def _reduce_offset(d_rows, off_c):
    """Canonical representative of a circle offset modulo span(dirs) + Z^c."""
    ann = null_space(d_rows)
    if not ann:
        return ()
    denom, u, diag, uinv = _quotient_lattice_data(ann)
    uvec = mat_vec(ann, tuple(off_c))
    w = mat_vec(u, tuple(x * denom for x in uvec))
    w_red = []
    for i, x in enumerate(w):
        di = diag[i] if i < len(diag) else 0
        if di:
            q = (x / di).numerator // (x / di).denominator
            w_red.append(x - q * di)
        else:
            w_red.append(x)
    back = mat_vec(uinv, tuple(w_red))
    return tuple(x / denom for x in back)


def _fixed_components(f: AffineTorusMap) -> list[_Component]:
    n, lines = f.n, f.lines
    circ = [i for i in range(n) if (i + 1) not in lines]
    free_lines = set()
    line_vals = {}
    for i1 in lines:
        a = f.linear[i1 - 1][i1 - 1]
        v = f.shift[i1 - 1]
        if a == 1:
            if v != 0:
                return []
            free_lines.add(i1)
        else:
            line_vals[i1] = v / 2
    c = len(circ)
    if c == 0:
        offset = [Fraction(0)] * n
        for i1, val in line_vals.items():
            offset[i1 - 1] = val
        return [_Component(n, lines, offset, (), free_lines)]
    m = [[f.linear[circ[i]][circ[j]] - int(i == j) for j in range(c)]
         for i in range(c)]
    u, d, v = smith_normal_form(m)
    w = mat_vec(u, tuple(-f.shift[i] for i in circ))
    choice_sets = []
    free_pos = []
    for k in range(c):
        dk = d[k][k]
        if dk == 0:
            if w[k].denominator != 1:
                return []
            free_pos.append(k)
            choice_sets.append([Fraction(0)])
        else:
            choice_sets.append([(w[k] + j) / dk for j in range(abs(dk))])
    out = []
    for combo in product(*choice_sets):
        x = mat_vec(v, combo)
        offset = [Fraction(0)] * n
        for idx, i in enumerate(circ):
            offset[i] = _mod1(x[idx])
        for i1, val in line_vals.items():
            offset[i1 - 1] = val
        dirs = []
        for k in free_pos:
            vec = [0] * n
            for idx, i in enumerate(circ):
                vec[i] = v[idx][k]
            dirs.append(tuple(vec))
        out.append(_Component(n, lines, offset, dirs, free_lines))
    out.sort(key=lambda comp: comp.display_offset())
    return out


def _transport(g: AffineTorusMap, comp: _Component) -> _Component:
    offset = list(g.apply(comp.offset))
    for i1 in comp.free_lines:
        offset[i1 - 1] = Fraction(0)
    dirs = [tuple(sum(g.linear[i][j] * d[j] for j in range(g.n))
                  for i in range(g.n)) for d in comp.directions]
    return _Component(comp.n, comp.lines, offset, dirs, comp.free_lines)


def _fixes_pointwise(g: AffineTorusMap, comp: _Component) -> bool:
    for d in comp.directions:
        if any(sum(g.linear[i][j] * d[j] for j in range(g.n)) != d[i]
               for i in range(g.n)):
            return False
    for i1 in comp.free_lines:
        if g.linear[i1 - 1][i1 - 1] != 1 or g.shift[i1 - 1] != 0:
            return False
    img = g.apply(comp.offset)
    for i in range(g.n):
        if (i + 1) in comp.free_lines:
            continue
        a, b = img[i], comp.offset[i]
        if (i + 1) in g.lines:
            if a != b:
                return False
        elif _mod1(a - b) != 0:
            return False
    return True


def _stabilizes_setwise(g: AffineTorusMap, comp: _Component) -> bool:
    return _transport(g, comp) == comp


def _acts_as_minus_one(g: AffineTorusMap, comp: _Component) -> bool:
    for d in comp.directions:
        if any(sum(g.linear[i][j] * d[j] for j in range(g.n)) != -d[i]
               for i in range(g.n)):
            return False
    return all(g.linear[i1 - 1][i1 - 1] == -1 for i1 in comp.free_lines)


def components_intersect(c1: _Component, c2: _Component) -> bool:
    """Do two fixed-set components share a point?"""
    if c1.n != c2.n or c1.lines != c2.lines:
        return False
    for i1 in c1.lines:
        free = (i1 in c1.free_lines) or (i1 in c2.free_lines)
        if not free and c1.offset[i1 - 1] != c2.offset[i1 - 1]:
            return False
    circ = [i for i in range(c1.n) if (i + 1) not in c1.lines]
    if not circ:
        return True
    joint = [tuple(d[i] for i in circ) for d in c1.directions + c2.directions]
    delta = [c2.offset[i] - c1.offset[i] for i in circ]
    return in_span_mod_lattice(joint, delta)


@dataclass(frozen=True)
class FlatStratum:
    """A flat piece of a fixed locus or singular set.

    count components upstairs (their representative offsets listed) that form
    one object downstairs; residual records how the setwise stabilizer acts on
    the component beyond its pointwise part.
    """

    torus_dim: int
    line_dim: int
    count: int
    offsets: tuple
    stabilizer: str = ""
    residual: str = "trivial"

    @property
    def type_label(self) -> str:
        parts = []
        if self.torus_dim:
            parts.append(f"T{self.torus_dim}")
        parts.extend(["R"] * self.line_dim)
        base = "x".join(parts) if parts else "point"
        if self.residual == "pm1":
            base += "/pm1"
        return base

    def to_json_dict(self) -> dict:
        return {
            "torus_dim": self.torus_dim,
            "line_dim": self.line_dim,
            "count": self.count,
            "type": self.type_label,
            "stabilizer": self.stabilizer,
            "residual": self.residual,
            "offsets": [[str(x) for x in off] for off in self.offsets],
        }


def fixed_set(f: AffineTorusMap) -> list[FlatStratum]:
    """Connected components of the fixed-point set, one stratum each."""
    comps = _fixed_components(f)
    return [FlatStratum(torus_dim=c.torus_dim, line_dim=c.line_dim, count=1,
                        offsets=(c.display_offset(),), stabilizer=f.name or "",
                        residual="trivial")
            for c in comps]


def _group_into_orbits(group: FiniteActionGroup, registry: dict):
    """registry maps component key -> (component, info); returns orbits as
    lists of keys, deterministically ordered."""
    unvisited = dict(registry)
    orbits = []
    for key in registry:
        if key not in unvisited:
            continue
        comp = registry[key][0]
        orbit_keys = []
        stack = [key]
        del unvisited[key]
        while stack:
            k = stack.pop()
            orbit_keys.append(k)
            base = registry[k][0]
            for g in group.elements:
                moved = _transport(g, base)
                mk = moved.key()
                if mk in unvisited:
                    del unvisited[mk]
                    stack.append(mk)
        orbit_keys.sort(key=lambda k: registry[k][0].display_offset())
        orbits.append(orbit_keys)
    return orbits


def _classify_residual(group: FiniteActionGroup, comp: _Component) -> str:
    pointwise = [g for g in group.elements if _fixes_pointwise(g, comp)]
    setwise = [g for g in group.elements if _stabilizes_setwise(g, comp)]
    if len(setwise) == len(pointwise):
        return "trivial"
    if len(setwise) == 2 * len(pointwise) and any(
            _acts_as_minus_one(g, comp) for g in setwise if g not in pointwise):
        return "pm1"
    return "other"


def _strata_from_orbits(group: FiniteActionGroup, registry: dict,
                        stabilizer_label) -> list[FlatStratum]:
    strata = []
    for orbit in _group_into_orbits(group, registry):
        rep = registry[orbit[0]][0]
        strata.append(FlatStratum(
            torus_dim=rep.torus_dim,
            line_dim=rep.line_dim,
            count=len(orbit),
            offsets=tuple(registry[k][0].display_offset() for k in orbit),
            stabilizer=stabilizer_label(orbit),
            residual=_classify_residual(group, rep),
        ))
    strata.sort(key=lambda s: (-(s.torus_dim + s.line_dim), s.stabilizer,
                               s.offsets))
    return strata


def singular_locus(group: FiniteActionGroup) -> list[FlatStratum]:
    """Orbits of fixed components of non-identity elements, as quotient strata."""
    registry: dict = {}
    for g in group.elements:
        if g.is_identity():
            continue
        for comp in _fixed_components(g):
            k = comp.key()
            if k in registry:
                registry[k][1].add(g)
            else:
                registry[k] = (comp, {g})

    def label(orbit):
        fixers = set()
        for k in orbit:
            fixers.update(h.name or "?" for h in registry[k][1])
        return ",".join(sorted(fixers))

    return _strata_from_orbits(group, registry, label)


def involution_fixed_census(sigma: AffineTorusMap,
                            group: FiniteActionGroup) -> list[FlatStratum]:
    """Classify fixed loci of the coset maps g∘sigma in the quotient by the group."""
    if sigma.n != group.n or sigma.lines != group.lines:
        raise InvalidOperand("involution acts on a different space")
    if not sigma.compose(sigma).is_identity():
        raise NotAntiInvolution("map is not an involution")
    if sigma in group:
        raise NotAntiInvolution("involution lies in the group itself")
    sigma_inv = sigma.inverse()
    for g in group.elements:
        if sigma.compose(g).compose(sigma_inv) not in group:
            raise NotEquivariant("involution does not normalize the group")
    registry: dict = {}
    for g in group.elements:
        f = g.compose(sigma)
        for comp in _fixed_components(f):
            k = comp.key()
            if k in registry:
                registry[k][1].add(f)
            else:
                registry[k] = (comp, {f})

    def label(orbit):
        fixers = set()
        for k in orbit:
            fixers.update(h.name or "?" for h in registry[k][1])
        return ",".join(sorted(fixers))

    return _strata_from_orbits(group, registry, label)


def quotient_betti(group: FiniteActionGroup) -> BettiVector:
    """Betti numbers of the quotient: averaged exterior-power traces of the
    circle block (line factors are contractible and contribute nothing)."""
    circ = [i for i in range(group.n) if (i + 1) not in group.lines]
    c = len(circ)
    order = group.order
    out = []
    for k in range(c + 1):
        total = Fraction(0)
        for g in group.elements:
            block = [[g.linear[i][j] for j in circ] for i in circ]
            tr = sum(det([[block[p][q] for q in sub] for p in sub])
                     for sub in combinations(range(c), k)) if k else 1
            total += tr
        avg = total / order
        if avg.denominator != 1 or avg < 0:
            raise InvalidOperand(
                f"invariant trace average b^{k} = {avg} is not a nonnegative integer")
        out.append(int(avg))
    return BettiVector(out)


def count_ends(group: FiniteActionGroup, i: int) -> int:
    """Ends of the quotient along line coordinate i: 2 if no element reverses it."""
    if i not in group.lines:
        raise InvalidOperand(f"coordinate {i} is not a line coordinate")
    return 1 if any(g.linear[i - 1][i - 1] == -1 for g in group.elements) else 2


def pull(group: FiniteActionGroup, i: int,
         bound: int = GROUP_SIZE_BOUND) -> FiniteActionGroup:
    """Convert circle coordinate i to a line coordinate.

    Every element must act on x_i as a reflection or as the identity; a
    translation along a coordinate that becomes a line has infinite order and
    is rejected.
    """
    if i in group.lines:
        raise InvalidOperand(f"coordinate {i} is already a line")
    if not (1 <= i <= group.n):
        raise InvalidOperand("coordinate out of range")
    new_lines = group.lines | {i}
    moved = []
    for g in group.elements:
        row = g.linear[i - 1]
        col = [g.linear[j][i - 1] for j in range(g.n)]
        if any(row[j] for j in range(g.n) if j != i - 1) or \
                any(col[j] for j in range(g.n) if j != i - 1):
            raise PullObstruction(
                f"element {g.name or g} mixes coordinate {i} with others")
        if g.linear[i - 1][i - 1] == 1 and g.shift[i - 1] != 0:
            raise PullObstruction(
                f"element {g.name or g} translates along coordinate {i}")
        moved.append(AffineTorusMap(g.linear, g.shift, new_lines, g.name))
    member_set = set(moved)
    for a in moved:
        for b in moved:
            if a.compose(b) not in member_set:
                raise PullObstruction(
                    "pulled maps do not close into a finite group")
    gens = [AffineTorusMap(g.linear, g.shift, new_lines, g.name)
            for g in group.generators]
    return generate_group(gens, bound)


def end_preserving_subgroup(group: FiniteActionGroup, i: int) -> FiniteActionGroup:
    """Subgroup of elements that fix the ends of line coordinate i."""
    if i not in group.lines:
        raise InvalidOperand(f"coordinate {i} is not a line coordinate")
    members = [g for g in group.elements if g.linear[i - 1][i - 1] == 1]
    return generate_group(members)


def cross_section_group(group: FiniteActionGroup, i: int) -> FiniteActionGroup:
    """The end-preserving subgroup, restricted to the cross-section T^{n-1}."""
    sub = end_preserving_subgroup(group, i)
    keep = [j for j in range(group.n) if j != i - 1]
    new_lines = frozenset(j if j < i else j - 1 for j in group.lines if j != i)
    members = []
    for g in sub.elements:
        lin = [[g.linear[p][q] for q in keep] for p in keep]
        shf = [g.shift[p] for p in keep]
        members.append(AffineTorusMap(lin, shf, new_lines, g.name))
    return generate_group(members)
