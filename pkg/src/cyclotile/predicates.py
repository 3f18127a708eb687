"""Checkable conclusions of the classification theory, as named predicates.

Each function takes an instance, checks the hypotheses of one structural
statement, and evaluates its conclusion; the test harness sweeps these over
enumerated and constructed instances.  They are deliberately thin: hypotheses
unmet raise Inapplicable, a False return is a counterexample (and a bug
somewhere), True is one more data point.
"""

from __future__ import annotations

from . import cyclo
from .multiset import Multiset
from .reduce import reduce_to_grid, subtile_condition, slab_instances_verify
from .structure import (
    detect_diagonal_boxes,
    detect_extended_corner,
    grid_fiber_report,
    grids_of,
    ijk_partition,
    is_m_fibered_on_grid,
    remove_fibers,
)
from .tiling import Inapplicable, TilingInstance, div_set, verify_direct
from .zm import Modulus


def _require(cond: bool, why: str) -> None:
    if not cond:
        raise Inapplicable(why)


def _is_3prime_tiling(t: TilingInstance) -> None:
    _require(t.modulus.num_primes == 3, "needs a 3-prime modulus")
    _require(verify_direct(t), "needs a verified tiling")


def unfibered_grid_has_diagonal_boxes(t: TilingInstance, anchor: int) -> bool:
    """If the grid restriction is nonempty and not a disjoint union of
    M-fibers, it must contain diagonal boxes."""
    _is_3prime_tiling(t)
    _require(cyclo.phi_divides(t.modulus.m, t.a), "needs the top cyclotomic on A")
    residual, _ = remove_fibers(t.a, anchor)
    members = [x for x in t.modulus.grid(anchor, t.modulus.d_of_m) if x in t.a]
    _require(bool(members), "grid restriction is empty")
    _require(len(residual) > 0, "grid restriction is a disjoint union of fibers")
    return detect_diagonal_boxes(t.a, anchor).found


def fiber_union_not_fibered_has_extended_corner(t: TilingInstance, anchor: int) -> bool:
    """A nonempty disjoint union of M-fibers that is not fibered in any single
    direction contains an extended corner in some direction."""
    _is_3prime_tiling(t)
    mod = t.modulus
    members = [x for x in mod.grid(anchor, mod.d_of_m) if x in t.a]
    _require(bool(members), "grid restriction is empty")
    residual, _ = remove_fibers(t.a, anchor)
    _require(len(residual) == 0, "grid restriction is not a union of fibers")
    rep = grid_fiber_report(t.a, anchor)
    _require(not rep.fibered_any, "grid restriction is fibered in one direction")
    return any(detect_extended_corner(t.a, anchor, nu).found for nu in range(3))


def fiber_union_uses_two_directions(t: TilingInstance, anchor: int) -> bool:
    """A nonempty disjoint union of M-fibers decomposes using at most two
    directions."""
    _is_3prime_tiling(t)
    mod = t.modulus
    members = set(x for x in mod.grid(anchor, mod.d_of_m) if x in t.a)
    _require(bool(members), "grid restriction is empty")
    residual, removed = remove_fibers(t.a, anchor)
    _require(len(residual) == 0, "grid restriction is not a union of fibers")
    # Search for an assignment using at most two directions.
    for skip in range(3):
        dirs = [nu for nu in range(3) if nu != skip]
        if _fiber_cover_with_dirs(mod, members, dirs):
            return True
    return False


def _fiber_cover_with_dirs(mod: Modulus, members: set[int], dirs: list[int]) -> bool:
    if not members:
        return True
    x = min(members)
    for nu in dirs:
        fib = set(mod.fiber(x, nu))
        if fib <= members:
            if _fiber_cover_with_dirs(mod, members - fib, dirs):
                return True
    return False


def fiber_chain_divisors(a: Multiset, nu: int) -> bool:
    """A union of fibers in one direction is divisible by the four cyclotomics
    at the two top scales in the other two directions."""
    mod = a.modulus
    _require(mod.num_primes == 3, "needs a 3-prime modulus")
    _require(all(n == 2 for _, n in mod.primes), "needs a square modulus")
    p = mod.primes[nu][0]
    step = mod.m // p
    sup = a.support()
    _require(bool(sup), "empty set")
    groups: dict[int, int] = {}
    for x in sup:
        groups[x % step] = groups.get(x % step, 0) + 1
    _require(all(c == p for c in groups.values()), "not a union of full fibers")
    for k in range(3):
        if k == nu:
            continue
        q = mod.primes[k][0]
        for alpha in (1, 2):
            if not cyclo.phi_divides(mod.m // q**alpha, a):
                return False
    return True


def triple_intersection_reduces(t: TilingInstance, budget: int = 10_000) -> bool:
    """Fibered tilings with an element on full fibers in all three directions
    reduce to a grid by fiber shifts."""
    _is_3prime_tiling(t)
    mod = t.modulus
    _require(all(p % 2 == 1 for p, _ in mod.primes), "needs odd primes")
    _require(all(n == 2 for _, n in mod.primes), "needs a square modulus")
    _require(cyclo.phi_divides(mod.m, t.a), "needs the top cyclotomic on A")
    part = ijk_partition(t)
    _require(part.flag_f, "assumption (F) does not hold")
    _require(bool(part.triple), "triple intersection is empty")
    trace = reduce_to_grid(t, budget)
    return trace is not None and trace.ok


def fibered_intersection_plane_filled(t: TilingInstance, a_elem: int, j: int, k: int) -> bool:
    """An element on full fibers in two directions, whose grid is fibered in
    one of them, fills its transverse plane with the double fiber."""
    _is_3prime_tiling(t)
    mod = t.modulus
    part = ijk_partition(t)
    _require(part.flag_f, "assumption (F) does not hold")
    nu = next(n for n in range(3) if n not in (j, k))
    _require(a_elem in part.set_for(j) and a_elem in part.set_for(k), "element not in both sets")
    anchor = a_elem % mod.d_of_m
    fj, _ = is_m_fibered_on_grid(t.a, anchor, j)
    fk, _ = is_m_fibered_on_grid(t.a, anchor, k)
    _require(fj or fk, "grid not fibered in either given direction")
    plane = set()
    for x in (a_elem,):
        cells = [x]
        for d in (j, k):
            step = mod.m // mod.primes[d][0]
            cells = [(y + tt * step) % mod.m for y in cells for tt in range(mod.primes[d][0])]
        plane = set(cells)
    p_nu = mod.primes[nu][0]
    full_plane = set(mod.plane(a_elem, p_nu ** mod.primes[nu][1]))
    in_plane = {x for x in t.a.support() if x in full_plane}
    return in_plane == plane


def single_direction_fibering_slab(t: TilingInstance, nu: int) -> bool:
    """A tiling with A fibered entirely in one direction passes the slab
    equivalence: the divisibility alternative holds and all translate slabs
    tile the quotient."""
    _is_3prime_tiling(t)
    mod = t.modulus
    support = frozenset(t.a.support())
    part = ijk_partition(t)
    _require(part.set_for(nu) == support, "A is not fibered in the direction")
    return subtile_condition(t, nu) and slab_instances_verify(t, nu)


def subtile_equivalence(t: TilingInstance, nu: int) -> bool:
    """The divisibility alternative agrees with direct slab verification.

    Valid for any number of primes (the slab construction only slices one
    coordinate)."""
    _require(verify_direct(t), "needs a verified tiling")
    p, n = t.modulus.primes[nu]
    _require(cyclo.phi_divides(p**n, t.a), "top prime-power cyclotomic missing on A")
    return subtile_condition(t, nu) == slab_instances_verify(t, nu)


def missing_divisor_profile_matches(t: TilingInstance) -> bool:
    """On every nonempty unfibered grid of a tiling with the top cyclotomic,
    the missing top divisors form one of the admitted profiles: none, one
    pair divisor, or two pair divisors sharing a prime (odd modulus)."""
    _is_3prime_tiling(t)
    mod = t.modulus
    _require(cyclo.phi_divides(mod.m, t.a), "needs the top cyclotomic on A")
    _require(all(p % 2 == 1 for p, _ in mod.primes), "odd modulus only")
    top = frozenset(d for d in mod.divisors if d % mod.d_of_m == 0)
    pair_type = set()
    for nu in range(3):
        others = [x for x in range(3) if x != nu]
        val = mod.m
        for o in others:
            val //= mod.primes[o][0]
        pair_type.add(val)
    for anchor in grids_of(mod):
        rep = grid_fiber_report(t.a, anchor)
        if rep.empty or rep.fibered_any:
            continue
        members = [x for x in mod.grid(anchor, mod.d_of_m) if x in t.a]
        missing = top - div_set(Multiset.from_set(mod, members)).members
        if not missing:
            continue
        if not missing <= pair_type:
            return False
        if len(missing) == 2:
            e = [mod.divisor_exponents(d) for d in missing]
            shared = [
                kk
                for kk in range(3)
                if e[0][kk] < mod.primes[kk][1] and e[1][kk] < mod.primes[kk][1]
            ]
            if len(shared) != 1:
                return False
        if len(missing) > 2:
            return False
    return True
