"""Fibering analysis and structure detection on top-scale grids.

A D(M)-grid of a 3-prime modulus is identified with the coordinate box
Z_{p_i} x Z_{p_j} x Z_{p_k}; the detectors below classify how a set meets
such a grid: fibered directions, diagonal boxes, corners and extended
corners, full planes, almost corners, and the even-modulus variants.  The
classification dispatches on which top divisors (multiples of D(M)) occur
among the differences of the grid restriction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import prod

import numpy as np

from . import cyclo
from .multiset import Multiset
from .tiling import Inapplicable, TilingInstance, div_set
from .zm import Modulus

_SUBSET_ENUM_GUARD = 1_000_000


class GridView:
    """A D(M)-grid with its coordinate identification.

    Coordinates: x in the grid corresponds to (x - anchor)/D read through CRT,
    so that moving by M/p_nu steps coordinate nu by one.
    """

    def __init__(self, mod: Modulus, anchor: int):
        if mod.num_primes != 3:
            raise ValueError("grid coordinates require a 3-prime modulus")
        self.mod = mod
        self.d = mod.d_of_m
        self.anchor = anchor % self.d
        self.sizes = tuple(p for p, _ in mod.primes)
        self._quot = Modulus.of(mod.m // self.d) if mod.m // self.d > 1 else None

    def elements(self) -> tuple[int, ...]:
        return self.mod.grid(self.anchor, self.d)

    def coords(self, x: int) -> tuple[int, ...]:
        if (x - self.anchor) % self.d != 0:
            raise ValueError(f"{x} is not on the grid")
        y = ((x - self.anchor) % self.mod.m) // self.d
        assert self._quot is not None
        return self._quot.array_coords(y)

    def from_coords(self, coords: tuple[int, ...]) -> int:
        assert self._quot is not None
        y = self._quot.from_coords(coords)
        return (self.anchor + y * self.d) % self.mod.m

    def occupancy(self, a: Multiset) -> np.ndarray:
        """Boolean array over Z_{p_i} x Z_{p_j} x Z_{p_k} marking members of a."""
        occ = np.zeros(self.sizes, dtype=bool)
        for x in self.elements():
            if x in a:
                occ[self.coords(x)] = True
        return occ


def grids_of(mod: Modulus) -> tuple[int, ...]:
    """Anchors (least elements) of all D(M)-grids."""
    return tuple(range(mod.d_of_m))


def is_m_fibered_on_grid(a: Multiset, anchor: int, nu: int) -> tuple[bool, tuple[int, ...]]:
    """Whether A meets the grid in a disjoint union of full M-fibers in the
    p_nu direction; returns (verdict, fiber roots).  Empty intersection is
    vacuously fibered with no roots."""
    mod = a.modulus
    d = mod.d_of_m
    p = mod.primes[nu][0]
    step = mod.m // p
    members = [x for x in mod.grid(anchor, d) if x in a]
    if not members:
        return True, ()
    groups: dict[int, list[int]] = {}
    for x in members:
        groups.setdefault(x % step, []).append(x)
    roots = []
    for r, xs in sorted(groups.items()):
        if len(xs) != p:
            return False, ()
        roots.append(min(xs))
    return True, tuple(sorted(roots))


@dataclass(frozen=True)
class GridFiberReport:
    anchor: int
    empty: bool
    fibered: tuple[bool, ...]  # per direction
    roots: tuple[tuple[int, ...], ...]  # per direction

    @property
    def fibered_any(self) -> bool:
        return not self.empty and any(self.fibered)


def grid_fiber_report(a: Multiset, anchor: int) -> GridFiberReport:
    mod = a.modulus
    members = [x for x in mod.grid(anchor, mod.d_of_m) if x in a]
    if not members:
        return GridFiberReport(anchor, True, (True,) * mod.num_primes, ((),) * mod.num_primes)
    flags, roots = [], []
    for nu in range(mod.num_primes):
        f, r = is_m_fibered_on_grid(a, anchor, nu)
        flags.append(f)
        roots.append(r)
    return GridFiberReport(anchor, False, tuple(flags), tuple(roots))


def fibered_on_all_grids(a: Multiset) -> bool:
    """Every nonempty grid restriction is M-fibered in at least one direction."""
    return all(grid_fiber_report(a, g).empty or grid_fiber_report(a, g).fibered_any
               for g in grids_of(a.modulus))


# -- the I/J/K membership partition ------------------------------------------------


@dataclass(frozen=True)
class IJKPartition:
    """Fiber membership of each element of A, with the standing-assumption flags."""

    sets: tuple[frozenset[int], ...]  # per direction: elements on a full fiber
    covers_a: bool  # A == I u J u K
    pairwise: tuple[tuple[int, int, int], ...]  # (nu, kappa, |intersection|)
    triple: frozenset[int]
    flag_f: bool
    flag_f1: bool
    flag_f2: bool
    flag_f3: bool

    def set_for(self, nu: int) -> frozenset[int]:
        return self.sets[nu]


def ijk_partition(t: TilingInstance) -> IJKPartition:
    """Per-direction full-fiber membership of A, plus the fibered-case flags."""
    mod = t.modulus
    if mod.num_primes != 3:
        raise ValueError("the fiber membership partition requires 3 primes")
    a = t.a
    table = t.box_table("a")
    sets = []
    for nu in range(3):
        p = mod.primes[nu][0]
        idx = mod.divisor_index(mod.m // p)
        members = frozenset(
            int(x) for x in np.flatnonzero(a.weights) if table[x, idx] == p - 1
        )
        sets.append(members)
    support = frozenset(a.support())
    covers = support == sets[0] | sets[1] | sets[2]
    pairwise = tuple(
        (n1, n2, len(sets[n1] & sets[n2])) for n1, n2 in combinations(range(3), 2)
    )
    triple = sets[0] & sets[1] & sets[2]
    odd = all(p % 2 == 1 for p, _ in mod.primes)
    square = all(n == 2 for _, n in mod.primes)
    pq = prod(p for p, _ in mod.primes)
    sizes_ok = len(t.a) == pq and len(t.b) == pq
    flag_f = (
        odd
        and square
        and sizes_ok
        and t.is_tiling()
        and cyclo.phi_divides(mod.m, a)
        and fibered_on_all_grids(a)
    )
    flag_f1 = flag_f and all(c == 0 for _, _, c in pairwise)
    flag_f2 = flag_f and not triple and any(c for _, _, c in pairwise)
    flag_f3 = flag_f and not triple and any(
        not sets[nu] and (sets[k1] - sets[k2]) and (sets[k2] - sets[k1])
        for nu, k1, k2 in ((0, 1, 2), (1, 0, 2), (2, 0, 1))
    )
    return IJKPartition(
        tuple(sets), covers, pairwise, triple, flag_f, flag_f1, flag_f2, flag_f3
    )


# -- structure findings ---------------------------------------------------------------


@dataclass(frozen=True)
class StructureFinding:
    """A detected grid structure with enough witness data to re-validate."""

    kind: str  # diagonal-boxes | corner | extended-corner | full-plane |
    #            almost-corner | even-corner | even-diagonal-boxes | none
    direction: int | None = None
    witness: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.kind != "none"


@lru_cache(maxsize=None)
def _subsets_lex(p: int) -> tuple[tuple[int, ...], ...]:
    """Nonempty proper subsets of Z_p as sorted tuples in lexicographic order."""
    out = []
    for size in range(1, p):
        out.extend(combinations(range(p), size))
    return tuple(sorted(out))


def detect_diagonal_boxes(a: Multiset, anchor: int) -> StructureFinding:
    """Find nonempty proper I, J, K with (IxJxK) u (I^c x J^c x K^c) inside the
    grid restriction; returns the lexicographically least witness or none.

    The subset search is exhaustive (not just proof-order slices), which is
    feasible for the small primes this library targets.
    """
    mod = a.modulus
    grid = GridView(mod, anchor)
    occ = grid.occupancy(a)
    pi, pj, pk = grid.sizes
    if prod((2**p - 2) for p in grid.sizes) > _SUBSET_ENUM_GUARD:
        raise ValueError("prime sizes too large for exhaustive subset search")
    # Bitmask layers: for each i, the allowed (j, k) cells as bit j*pk + k.
    layer = []
    for i in range(pi):
        bits = 0
        for j in range(pj):
            for k in range(pk):
                if occ[i, j, k]:
                    bits |= 1 << (j * pk + k)
        layer.append(bits)
    all_jk = (1 << (pj * pk)) - 1

    def and_over(rows: tuple[int, ...]) -> int:
        out = all_jk
        for i in rows:
            out &= layer[i]
        return out

    k_masks = {ks: sum(1 << k for k in ks) for ks in _subsets_lex(pk)}
    for i_set in _subsets_lex(pi):
        ic = tuple(v for v in range(pi) if v not in i_set)
        allow = and_over(i_set)
        allow_c = and_over(ic)
        if not allow or not allow_c:
            continue
        for j_set in _subsets_lex(pj):
            jc = tuple(v for v in range(pj) if v not in j_set)
            for k_set in _subsets_lex(pk):
                kc = tuple(v for v in range(pk) if v not in k_set)
                box = 0
                for j in j_set:
                    box |= k_masks[k_set] << (j * pk)
                if box & ~allow:
                    continue
                box_c = 0
                for j in jc:
                    box_c |= k_masks[kc] << (j * pk)
                if box_c & ~allow_c:
                    continue
                return StructureFinding(
                    "diagonal-boxes",
                    None,
                    {
                        "anchor": grid.anchor,
                        "i": tuple(i_set),
                        "j": tuple(j_set),
                        "k": tuple(k_set),
                    },
                )
    return StructureFinding("none")


def _subgrid_2d(mod: Modulus, x: int, nu: int) -> tuple[int, ...]:
    """x * F_j * F_k for the two directions other than nu (a 2d grid slice)."""
    others = [k for k in range(3) if k != nu]
    out = [x]
    for k in others:
        step = mod.m // mod.primes[k][0]
        out = [(y + t * step) % mod.m for y in out for t in range(mod.primes[k][0])]
    return tuple(sorted(out))


def _fibered_within(a: Multiset, cells: tuple[int, ...], nu: int) -> bool:
    """Whether A's trace on the cells is a nonempty disjoint union of full
    p_nu-fibers (all fibers entirely inside the cells)."""
    mod = a.modulus
    p = mod.primes[nu][0]
    step = mod.m // p
    members = [x for x in cells if x in a]
    if not members:
        return False
    groups: dict[int, int] = {}
    for x in members:
        groups[x % step] = groups.get(x % step, 0) + 1
    return all(c == p for c in groups.values())


def detect_corner(a: Multiset, anchor: int, nu: int) -> StructureFinding:
    """Strict corner in direction nu: two parallel 2d slices holding exactly
    one fiber each, in the two different transverse directions."""
    mod = a.modulus
    others = [k for k in range(3) if k != nu]
    members = [x for x in mod.grid(anchor, mod.d_of_m) if x in a]
    step = mod.m // mod.primes[nu][0]
    for x in sorted(members):
        for t in range(1, mod.primes[nu][0]):
            xi = (x + t * step) % mod.m
            if xi not in a:
                continue
            plane_x = _subgrid_2d(mod, x, nu)
            plane_xi = _subgrid_2d(mod, xi, nu)
            in_x = tuple(sorted(y for y in plane_x if y in a))
            in_xi = tuple(sorted(y for y in plane_xi if y in a))
            for d1, d2 in (others, others[::-1]):
                f1 = tuple(sorted(mod.fiber(x, d1)))
                f2 = tuple(sorted(mod.fiber(xi, d2)))
                if in_x == f1 and in_xi == f2:
                    return StructureFinding(
                        "corner",
                        nu,
                        {"a": x, "a_i": xi, "dir_a": d1, "dir_ai": d2},
                    )
    return StructureFinding("none")


def detect_extended_corner(a: Multiset, anchor: int, nu: int) -> StructureFinding:
    """Extended corner in direction nu: two parallel 2d slices fibered in the
    two transverse directions exclusively (one each)."""
    mod = a.modulus
    others = [k for k in range(3) if k != nu]
    members = [x for x in mod.grid(anchor, mod.d_of_m) if x in a]
    step = mod.m // mod.primes[nu][0]
    for x in sorted(members):
        for t in range(1, mod.primes[nu][0]):
            xi = (x + t * step) % mod.m
            if xi not in a:
                continue
            plane_x = _subgrid_2d(mod, x, nu)
            plane_xi = _subgrid_2d(mod, xi, nu)
            for d1, d2 in (others, others[::-1]):
                if (
                    _fibered_within(a, plane_x, d1)
                    and not _fibered_within(a, plane_x, d2)
                    and _fibered_within(a, plane_xi, d2)
                    and not _fibered_within(a, plane_xi, d1)
                ):
                    return StructureFinding(
                        "extended-corner",
                        nu,
                        {"a": x, "a_i": xi, "dir_a": d1, "dir_ai": d2},
                    )
    return StructureFinding("none")


def remove_fibers(a: Multiset, anchor: int) -> tuple[Multiset, tuple[tuple[int, int], ...]]:
    """Strip whole M-fibers from the grid restriction until none remain.

    Deterministic: least root first, direction order on ties.  Returns the
    residual restriction (as a multiset on Z_m supported on the grid) and the
    removed (root, direction) list.  The residual is one admissible outcome;
    the procedure itself is order-sensitive.
    """
    mod = a.modulus
    current = {x for x in mod.grid(anchor, mod.d_of_m) if x in a}
    removed: list[tuple[int, int]] = []
    changed = True
    while changed:
        changed = False
        for x in sorted(current):
            for nu in range(mod.num_primes):
                fib = mod.fiber(x, nu)
                if all(y in current for y in fib):
                    current -= set(fib)
                    removed.append((min(fib), nu))
                    changed = True
                    break
            if changed:
                break
    return Multiset.from_set(mod, sorted(current)), tuple(removed)


# -- classification of a single unfibered grid -----------------------------------------


def _top_divisor_profile(a: Multiset, anchor: int) -> tuple[frozenset[int], frozenset[int]]:
    """(present, missing) top divisors {m : D(M) | m | M} of Div(A & grid)."""
    mod = a.modulus
    members = [x for x in mod.grid(anchor, mod.d_of_m) if x in a]
    top = frozenset(m for m in mod.divisors if m % mod.d_of_m == 0)
    present = div_set(Multiset.from_set(mod, members)).members & top
    return present, top - present


def _boxes_exactly_cover(a: Multiset, anchor: int, finding: StructureFinding) -> bool:
    grid = GridView(a.modulus, anchor)
    occ = grid.occupancy(a)
    w = finding.witness
    shape = np.zeros(grid.sizes, dtype=bool)
    full = [list(range(p)) for p in grid.sizes]
    ic = [v for v in full[0] if v not in w["i"]]
    jc = [v for v in full[1] if v not in w["j"]]
    kc = [v for v in full[2] if v not in w["k"]]
    shape[np.ix_(list(w["i"]), list(w["j"]), list(w["k"]))] = True
    shape[np.ix_(ic, jc, kc)] = True
    return bool(np.array_equal(occ, shape))


def _detect_full_plane(a: Multiset, anchor: int, nu: int) -> StructureFinding:
    """Witness point whose grid box realizes only the N/p_nu and N/(p_j p_k)
    entries, at their full counts."""
    mod = a.modulus
    others = [k for k in range(3) if k != nu]
    members = frozenset(x for x in mod.grid(anchor, mod.d_of_m) if x in a)
    g = mod.gcd_table()
    p_nu = mod.primes[nu][0]
    pj, pk = (mod.primes[k][0] for k in others)
    want_nu = mod.m // p_nu
    want_jk = mod.m // (pj * pk)
    for x in mod.grid(anchor, mod.d_of_m):
        if x in members:
            continue
        counts: dict[int, int] = {}
        for y in members:
            counts[int(g[(x - y) % mod.m])] = counts.get(int(g[(x - y) % mod.m]), 0) + 1
        if (
            counts.get(want_nu, 0) == p_nu - 1
            and counts.get(want_jk, 0) == (pj - 1) * (pk - 1)
            and sum(counts.values()) == (p_nu - 1) + (pj - 1) * (pk - 1)
        ):
            return StructureFinding("full-plane", nu, {"anchor": anchor, "x": x})
    return StructureFinding("none")


def _corner_planes_ok(a: Multiset, anchor: int, nu: int) -> bool:
    """Every transverse plane of the grid is empty or a single fiber in one of
    the two other directions, with both directions represented."""
    mod = a.modulus
    others = [k for k in range(3) if k != nu]
    seen_dirs: set[int] = set()
    x0 = anchor
    step = mod.m // mod.primes[nu][0]
    for t in range(mod.primes[nu][0]):
        cells = _subgrid_2d(mod, (x0 + t * step) % mod.m, nu)
        inside = [y for y in cells if y in a]
        if not inside:
            continue
        matched = False
        for d in others:
            if len(inside) == mod.primes[d][0] and tuple(sorted(inside)) == tuple(
                sorted(mod.fiber(inside[0], d))
            ):
                seen_dirs.add(d)
                matched = True
                break
        if not matched:
            return False
    return seen_dirs == set(others)


def classify_unfibered_grid(a: Multiset, anchor: int) -> StructureFinding:
    """Label an unfibered grid restriction by its top-divisor profile.

    Preconditions (checked): Phi_M divides A, the restriction is nonempty and
    not M-fibered in any direction.  Dispatch: no missing top divisors ->
    diagonal boxes (with the fiber-stripping decomposition); one missing pair
    divisor -> corner or almost-corner; two missing pair divisors sharing a
    prime -> full plane; a missing top difference M/p with p = 2 -> pure
    diagonal boxes (even case).  Shapes that cannot occur under the
    preconditions come back as 'none'.
    """
    mod = a.modulus
    if mod.num_primes != 3:
        raise ValueError("grid classification requires 3 primes")
    report = grid_fiber_report(a, anchor)
    if report.empty:
        raise ValueError("grid restriction is empty")
    if report.fibered_any:
        raise ValueError("grid restriction is fibered; nothing to classify")
    if not cyclo.phi_divides(mod.m, a):
        raise ValueError("Phi_M does not divide A")
    present, missing = _top_divisor_profile(a, anchor)
    even = any(p == 2 for p, _ in mod.primes)

    if not missing:
        finding = detect_diagonal_boxes(a, anchor)
        if not finding.found:
            return StructureFinding("none")
        residual, stripped = remove_fibers(a, anchor)
        witness = dict(finding.witness)
        witness["removed_fibers"] = stripped
        witness["residual_size"] = len(residual)
        return StructureFinding("diagonal-boxes", None, witness)

    top_missing = [mod.m // p for p, _ in mod.primes]
    missing_tops = [d for d in missing if d in top_missing]
    if missing_tops:
        # Odd primes with a missing top difference force fibering; only the
        # even direction can survive unfibered (pure diagonal boxes).
        for d in missing_tops:
            nu = top_missing.index(d)
            if mod.primes[nu][0] == 2:
                finding = detect_diagonal_boxes(a, anchor)
                if finding.found and _boxes_exactly_cover(a, anchor, finding):
                    w = dict(finding.witness)
                    return StructureFinding("even-diagonal-boxes", nu, w)
        return StructureFinding("none")

    pair_type = set()
    for nu in range(3):
        others = [k for k in range(3) if k != nu]
        pair_type.add(mod.m // prod(mod.primes[k][0] for k in others))

    missing_pairs = sorted(d for d in missing if d in pair_type)
    if len(missing_pairs) == 1:
        # missing M/(p_i p_j): corner/almost-corner in the remaining direction
        d = missing_pairs[0]
        exps = mod.divisor_exponents(d)
        nu = next(k for k in range(3) if exps[k] == mod.primes[k][1])
        if _corner_planes_ok(a, anchor, nu):
            kind = "even-corner" if even else "corner"
            inner = detect_corner(a, anchor, nu)
            return StructureFinding(kind, nu, dict(inner.witness, anchor=anchor))
        if not even:
            finding = detect_diagonal_boxes(a, anchor)
            if finding.found and _boxes_exactly_cover(a, anchor, finding):
                w = finding.witness
                sizes = (len(w["i"]), len(w["j"]), len(w["k"]))
                comp = tuple(p - s for p, s in zip(GridView(mod, anchor).sizes, sizes))
                transverse = [k for k in range(3) if k != nu]
                # Almost corner: both transverse directions pinched to a
                # singleton on one side, the corner direction proper on both.
                if (
                    min(sizes[nu], comp[nu]) > 1
                    and all(min(sizes[k], comp[k]) == 1 for k in transverse)
                ):
                    return StructureFinding("almost-corner", nu, dict(w))
        return StructureFinding("none")
    if len(missing_pairs) == 2:
        e1 = mod.divisor_exponents(missing_pairs[0])
        e2 = mod.divisor_exponents(missing_pairs[1])
        shared = [
            k
            for k in range(3)
            if e1[k] < mod.primes[k][1] and e2[k] < mod.primes[k][1]
        ]
        if len(shared) == 1 and not even:
            nu = shared[0]
            finding = _detect_full_plane(a, anchor, nu)
            if finding.found:
                return finding
    return StructureFinding("none")


# -- plane bound and missing-top-difference fibering ------------------------------------


def plane_bound_check(t: TilingInstance, require_tiling: bool = True) -> bool:
    """Cardinality bound for tile-plane intersections at every scale.

    |A & Pi(x, p_nu^{n_nu - alpha})| <= p_nu^alpha * |A| / p_nu^{beta_nu},
    where p_nu^{beta_nu} exactly divides |A|; checked for all x and alpha.
    The bound is a theorem for tilings; pass require_tiling=False to run the
    counting on arbitrary instances (it can then return False).
    """
    if require_tiling and not t.is_tiling():
        raise ValueError("plane bound is stated for verified tilings")
    mod = t.modulus
    size = len(t.a)
    sup = np.array(t.a.support(), dtype=np.int64)
    for nu, (p, n) in enumerate(mod.primes):
        beta = 0
        while size % p ** (beta + 1) == 0:
            beta += 1
        for alpha in range(0, n + 1):
            scale = p ** (n - alpha)
            bound = p**alpha * (size // p**beta)
            if scale == 1:
                if size > bound:
                    return False
                continue
            counts = np.bincount(sup % scale, minlength=scale)
            if counts.max() > bound:
                return False
    return True


@dataclass(frozen=True)
class FiberingReport:
    scale: int
    direction: int
    applicable: bool
    per_grid: tuple[tuple[int, int], ...]  # (grid anchor, fibered direction)
    single_direction: int | None
    holds: bool


def missing_top_difference_fibering(a: Multiset, n_div: int, nu: int) -> FiberingReport:
    """Check the fibering forced by a missing top difference N/p_nu.

    Hypotheses: Phi_N | A, reduced weights take a single nonzero value, p_nu
    odd, and N/p_nu absent from Div_N on the grid under test.  Verifies that
    every such grid is N-fibered in one of the other two directions; when two
    top differences are missing (both odd primes), additionally confirms the
    global single-direction fibering.  Raises Inapplicable outside the
    hypotheses; holds=False would be a counterexample.
    """
    mod = a.modulus
    if mod.m % n_div != 0:
        raise Inapplicable(f"N={n_div} must divide m={mod.m}")
    sub = Modulus.of(n_div)
    if sub.num_primes != 3:
        raise Inapplicable("the fibering lemma needs all three primes alive in N")
    if sub.primes[nu][0] == 2:
        raise Inapplicable("the missing-direction prime must be odd")
    reduced = a.reduce_mod(n_div) if mod.m != n_div else a
    vals = set(int(v) for v in np.unique(reduced.weights)) - {0}
    if len(vals) != 1:
        raise Inapplicable("reduced weights must take a single nonzero value")
    if not cyclo.phi_divides(n_div, reduced):
        raise Inapplicable(f"Phi_{n_div} does not divide A")
    others = [k for k in range(3) if k != nu]
    n_over_p = n_div // sub.primes[nu][0]

    def grid_members(anchor: int) -> list[int]:
        return [x for x in sub.grid(anchor, sub.d_of_m) if reduced.weights[x] != 0]

    per_grid: list[tuple[int, int]] = []
    holds = True
    missing_global = n_over_p not in div_set(reduced).members
    for anchor in range(sub.d_of_m):
        members = grid_members(anchor)
        if not members:
            continue
        local_div = div_set(Multiset.from_pairs(sub, [(x, 1) for x in members])).members
        if n_over_p in local_div:
            continue  # hypothesis not met on this grid
        direction = None
        for k in others:
            if _n_fibered_on_grid(reduced, sub, anchor, k):
                direction = k
                break
        if direction is None:
            holds = False
        else:
            per_grid.append((anchor, direction))
    single = None
    other_missing = [
        k
        for k in others
        if sub.primes[k][0] != 2 and n_div // sub.primes[k][0] not in div_set(reduced).members
    ]
    if missing_global and other_missing:
        third = next(k for k in range(3) if k != nu and k not in other_missing)
        if _n_fibered_everywhere(reduced, sub, third):
            single = third
        else:
            holds = False
    return FiberingReport(n_div, nu, True, tuple(per_grid), single, holds)


def _n_fibered_on_grid(reduced: Multiset, sub: Modulus, anchor: int, nu: int) -> bool:
    p = sub.primes[nu][0]
    step = sub.m // p
    members = [x for x in sub.grid(anchor, sub.d_of_m) if reduced.weights[x] != 0]
    if not members:
        return True
    groups: dict[int, list[int]] = {}
    for x in members:
        groups.setdefault(x % step, []).append(x)
    for xs in groups.values():
        if len(xs) != p:
            return False
        if len({int(reduced.weights[x]) for x in xs}) != 1:
            return False
    return True


def _n_fibered_everywhere(reduced: Multiset, sub: Modulus, nu: int) -> bool:
    return all(
        _n_fibered_on_grid(reduced, sub, anchor, nu) for anchor in range(sub.d_of_m)
    )
