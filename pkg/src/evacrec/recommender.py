"""Constraint-based allocation of driver/vehicle pairs to rescue points and
shelters.

A plan assigns each available resource at most one trip: drive to a rescue
point, pick up evacuees, drop them at one shelter.  Feasible plans satisfy
vehicle capacity (seats minus the driver), wheelchair-slot limits, shelter
intake capacity, terrain compatibility and single use.  Among feasible plans
the solver minimizes, lexicographically:

    1. priority-weighted uncovered demand,
    2. total travel time (sum of both legs over all trips),
    3. number of vehicles used,

with a final deterministic tie-break on the sorted list of
(resource, rescue point, shelter) id triples.  Instances up to the configured
exact-size bound are solved exactly by branch and bound; larger ones fall back
to a clearly flagged greedy heuristic plus a sound lower bound on total time.

``enumerate_all`` walks the complete plan space and is the ground-truth oracle
for the exact solver at small scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

from .errors import InstanceTooLarge, SchemaViolation, UnknownEntity
from .kb import ALL_TERRAINS, MobileResource, RescuePoint, Shelter
from .roadnet import TravelTimeMatrix

# Exhaustive enumeration stays the test oracle only at this scale.
ORACLE_MAX_RESOURCES = 6
ORACLE_MAX_RESCUE_POINTS = 4
ORACLE_MAX_SHELTERS = 3

DEFAULT_EXACT_BOUND = 12


class PlanStatus(str, Enum):
    FULL_COVERAGE = "full_coverage"
    PARTIAL_COVERAGE = "partial_coverage"
    EMPTY = "empty"


@dataclass(frozen=True)
class ConstraintSet:
    """Togglable constraint families.

    Vehicle capacity and single use are structural and always enforced; they
    define feasibility itself.
    """

    enforce_wheelchair: bool = True
    enforce_shelter_capacity: bool = True
    enforce_terrain: bool = True


@dataclass(frozen=True)
class SolverConfig:
    exact_bound: int = DEFAULT_EXACT_BOUND
    # Opt-in alternative second objective: longest single trip instead of the
    # sum of trip times.
    makespan: bool = False


@dataclass(frozen=True)
class Assignment:
    resource: str
    rescue_point: str
    shelter: str
    evacuees_loaded: int
    wheelchair_loaded: int
    t_to_rp: int
    t_rp_to_shelter: int


@dataclass(frozen=True)
class RecommendationPlan:
    assignments: tuple[Assignment, ...]
    objective: tuple[int, int, int]  # (uncovered_weight, total_time, vehicles_used)
    uncovered: tuple[tuple[str, int, int], ...]  # (rescue_point, evacuees_left, wheelchair_left)
    status: PlanStatus
    solver: str = "exact"
    lower_bound_s: int | None = None

    def triple_key(self) -> tuple[tuple[str, str, str], ...]:
        return tuple(sorted((a.resource, a.rescue_point, a.shelter) for a in self.assignments))


@dataclass(frozen=True)
class ProblemInstance:
    resources: tuple[MobileResource, ...]
    rescue_points: tuple[RescuePoint, ...]
    shelters: tuple[Shelter, ...]
    constraints: ConstraintSet
    times_to_rp: TravelTimeMatrix
    times_rp_to_shelter: TravelTimeMatrix


def make_instance(
    resources: Iterable[MobileResource],
    rescue_points: Iterable[RescuePoint],
    shelters: Iterable[Shelter],
    constraints: ConstraintSet,
    times_to_rp: TravelTimeMatrix,
    times_rp_to_shelter: TravelTimeMatrix,
) -> ProblemInstance:
    """Normalize, validate and freeze a problem instance.

    Entity lists are sorted by id, so any permutation of the same inputs
    compiles to the identical instance.
    """
    res = tuple(sorted(resources, key=lambda r: r.id))
    rps = tuple(sorted(rescue_points, key=lambda p: p.id))
    shs = tuple(sorted(shelters, key=lambda s: s.id))
    for seq, label in ((res, "resource"), (rps, "rescue point"), (shs, "shelter")):
        ids = [x.id for x in seq]
        if len(set(ids)) != len(ids):
            raise SchemaViolation(f"duplicate {label} ids in instance")
    for r in res:
        if not r.available or r.committed:
            raise SchemaViolation(f"resource {r.id} is not allocatable (unavailable or committed)")
    # Probe every pair once so an incomplete matrix fails loudly up front.
    for r in res:
        for p in rps:
            times_to_rp.get(r.id, p.id)
    for p in rps:
        for s in shs:
            times_rp_to_shelter.get(p.id, s.id)
    return ProblemInstance(
        resources=res,
        rescue_points=rps,
        shelters=shs,
        constraints=constraints,
        times_to_rp=times_to_rp,
        times_rp_to_shelter=times_rp_to_shelter,
    )


def load_rule(
    members: Sequence[tuple[str, int, int, int]],
    evacuees: int,
    wheelchair_evacuees: int,
    *,
    enforce_wheelchair: bool = True,
) -> dict[str, tuple[int, int]]:
    """Split one rescue point's demand over the resources assigned to it.

    ``members`` holds ``(resource_id, t_to_rp, capacity, wheelchair_slots)``
    tuples.  Wheelchair evacuees are seated first, into wheelchair slots, in
    order of ascending arrival time (ties by resource id); the remaining
    evacuees then fill the remaining seats in the same order.  Returns
    ``resource_id -> (evacuees_loaded, wheelchair_loaded)``.
    """
    ordered = sorted(members, key=lambda m: (m[1], m[0]))
    out: dict[str, tuple[int, int]] = {}
    if enforce_wheelchair:
        rem_wheel = wheelchair_evacuees
        rem_ambulant = evacuees - wheelchair_evacuees
    else:
        rem_wheel = 0
        rem_ambulant = evacuees
    wheel_loaded: list[int] = []
    for _, _, capacity, slots in ordered:
        w = min(rem_wheel, slots, capacity)
        wheel_loaded.append(w)
        rem_wheel -= w
    for (rid, _, capacity, _), w in zip(ordered, wheel_loaded):
        a = min(rem_ambulant, capacity - w)
        rem_ambulant -= a
        out[rid] = (w + a, w)
    return out


# ---------------------------------------------------------------------------
# Compiled instance and incremental search state
# ---------------------------------------------------------------------------


class _Compiled:
    """Array view of an instance for the search engines."""

    __slots__ = (
        "res_ids", "caps", "slots", "rp_ids", "demand", "wheel", "prio",
        "sh_ids", "sh_cap", "t1", "t2", "options", "rank", "n_res", "n_rp",
        "n_sh", "enforce_wheelchair", "enforce_shelter", "total_weight",
        "prio_order", "makespan",
    )

    def __init__(self, instance: ProblemInstance, makespan: bool = False):
        con = instance.constraints
        self.enforce_wheelchair = con.enforce_wheelchair
        self.enforce_shelter = con.enforce_shelter_capacity
        self.makespan = makespan
        self.res_ids = [r.id for r in instance.resources]
        self.caps = [r.capacity for r in instance.resources]
        self.slots = [r.vehicle.wheelchair_slots for r in instance.resources]
        self.rp_ids = [p.id for p in instance.rescue_points]
        self.demand = [p.evacuees for p in instance.rescue_points]
        self.wheel = [p.wheelchair_evacuees for p in instance.rescue_points]
        self.prio = [p.priority for p in instance.rescue_points]
        self.sh_ids = [s.id for s in instance.shelters]
        self.sh_cap = [s.capacity for s in instance.shelters]
        self.n_res = len(self.res_ids)
        self.n_rp = len(self.rp_ids)
        self.n_sh = len(self.sh_ids)
        self.t1 = [
            [instance.times_to_rp.get(r.id, p.id) for p in instance.rescue_points]
            for r in instance.resources
        ]
        self.t2 = [
            [instance.times_rp_to_shelter.get(p.id, s.id) for s in instance.shelters]
            for p in instance.rescue_points
        ]
        self.total_weight = sum(pr * d for pr, d in zip(self.prio, self.demand))
        self.prio_order = sorted(range(self.n_rp), key=lambda p: (-self.prio[p], self.rp_ids[p]))

        allowed = []
        for p, rp in enumerate(instance.rescue_points):
            terr = rp.required_terrains if rp.required_terrains is not None else ALL_TERRAINS
            allowed.append(terr)
        # Admissible (rescue point, shelter, trip seconds) triples per resource,
        # ordered by (rescue point, shelter) index.
        self.options: list[tuple[tuple[int, int, int], ...]] = []
        for r, res in enumerate(instance.resources):
            opts = []
            for p in range(self.n_rp):
                if self.t1[r][p] is None or self.demand[p] == 0:
                    continue
                if con.enforce_terrain and res.vehicle.terrain not in allowed[p]:
                    continue
                if (
                    self.enforce_wheelchair
                    and self.demand[p] == self.wheel[p]
                    and self.slots[r] == 0
                ):
                    # Wheelchair-only demand can never occupy this vehicle.
                    continue
                for s in range(self.n_sh):
                    if self.t2[p][s] is None or self.sh_cap[s] == 0:
                        continue
                    opts.append((p, s, self.t1[r][p] + self.t2[p][s]))
            self.options.append(tuple(opts))
        # Arrival order per rescue point: ascending time, ties by resource id.
        self.rank = []
        for p in range(self.n_rp):
            order = sorted(
                (r for r in range(self.n_res) if self.t1[r][p] is not None),
                key=lambda r: (self.t1[r][p], self.res_ids[r]),
            )
            ranks = [-1] * self.n_res
            for i, r in enumerate(order):
                ranks[r] = i
            self.rank.append(ranks)


class _SearchState:
    """Incrementally maintained loads, coverage and shelter intake for a
    partial assignment vector."""

    __slots__ = (
        "comp", "groups", "load", "shelter_of", "sh_sum", "cov",
        "sum_prio_cov", "time_sum", "times_stack", "assigned_count",
        "zero_count", "over_count", "ded",
    )

    def __init__(self, comp: _Compiled):
        self.comp = comp
        self.groups: list[list[int]] = [[] for _ in range(comp.n_rp)]
        self.load = [0] * comp.n_res
        self.shelter_of = [-1] * comp.n_res
        self.sh_sum = [0] * comp.n_sh
        self.cov = [0] * comp.n_rp
        self.sum_prio_cov = 0
        self.time_sum = 0
        self.times_stack: list[int] = []
        self.assigned_count = 0
        self.zero_count = 0
        self.over_count = 0
        self.ded = [0] * comp.n_rp

    def _clear_rp(self, p: int) -> None:
        comp = self.comp
        sh_sum = self.sh_sum
        sh_cap = comp.sh_cap
        for r in self.groups[p]:
            l = self.load[r]
            if l:
                s = self.shelter_of[r]
                old = sh_sum[s]
                new = old - l
                sh_sum[s] = new
                if old > sh_cap[s] >= new:
                    self.over_count -= 1
            else:
                self.zero_count -= 1
        self.sum_prio_cov -= comp.prio[p] * self.cov[p]

    def _apply_rp(self, p: int) -> None:
        comp = self.comp
        caps = comp.caps
        slots = comp.slots
        sh_sum = self.sh_sum
        sh_cap = comp.sh_cap
        if comp.enforce_wheelchair:
            rem_w = comp.wheel[p]
            rem_a = comp.demand[p] - rem_w
        else:
            rem_w = 0
            rem_a = comp.demand[p]
        cov = 0
        for r in self.groups[p]:
            w = rem_w if rem_w < slots[r] else slots[r]
            rem_w -= w
            a = caps[r] - w
            if a > rem_a:
                a = rem_a
            rem_a -= a
            l = w + a
            self.load[r] = l
            if l:
                s = self.shelter_of[r]
                old = sh_sum[s]
                new = old + l
                sh_sum[s] = new
                if new > sh_cap[s] >= old:
                    self.over_count += 1
            else:
                self.zero_count += 1
            cov += l
        self.cov[p] = cov
        self.sum_prio_cov += comp.prio[p] * cov

    def push(self, r: int, p: int, s: int) -> None:
        comp = self.comp
        self._clear_rp(p)
        rank = comp.rank[p]
        group = self.groups[p]
        # binary insert by precomputed arrival rank keeps order without re-sorting
        rk = rank[r]
        lo = 0
        hi = len(group)
        while lo < hi:
            mid = (lo + hi) // 2
            if rank[group[mid]] < rk:
                lo = mid + 1
            else:
                hi = mid
        group.insert(lo, r)
        self.shelter_of[r] = s
        self._apply_rp(p)
        t = comp.t1[r][p] + comp.t2[p][s]
        self.time_sum += t
        self.times_stack.append(t)
        self.assigned_count += 1
        self.ded[p] += comp.caps[r]

    def pop(self, r: int, p: int, s: int) -> None:
        comp = self.comp
        self._clear_rp(p)
        self.groups[p].remove(r)
        self.load[r] = 0
        self.shelter_of[r] = -1
        self._apply_rp(p)
        self.time_sum -= comp.t1[r][p] + comp.t2[p][s]
        self.times_stack.pop()
        self.assigned_count -= 1
        self.ded[p] -= comp.caps[r]

    def valid(self) -> bool:
        return self.zero_count == 0 and (not self.comp.enforce_shelter or self.over_count == 0)

    def objective(self) -> tuple[int, int, int]:
        time_part = max(self.times_stack, default=0) if self.comp.makespan else self.time_sum
        return (self.comp.total_weight - self.sum_prio_cov, time_part, self.assigned_count)


# ---------------------------------------------------------------------------
# Exhaustive enumeration (the oracle)
# ---------------------------------------------------------------------------


def _check_oracle_scale(instance: ProblemInstance) -> None:
    if (
        len(instance.resources) > ORACLE_MAX_RESOURCES
        or len(instance.rescue_points) > ORACLE_MAX_RESCUE_POINTS
        or len(instance.shelters) > ORACLE_MAX_SHELTERS
    ):
        raise InstanceTooLarge(
            "exhaustive enumeration is limited to "
            f"{ORACLE_MAX_RESOURCES} resources, {ORACLE_MAX_RESCUE_POINTS} rescue points "
            f"and {ORACLE_MAX_SHELTERS} shelters",
            resources=len(instance.resources),
            rescue_points=len(instance.rescue_points),
            shelters=len(instance.shelters),
        )


def _enumerate(comp: _Compiled, on_leaf: Callable) -> None:
    """Depth-first walk over every assignment vector; ``on_leaf`` sees each
    feasible one with its objective.

    The load bookkeeping is inlined on local variables: this loop visits every
    leaf of the plan space, so it is by far the hottest path in the package.
    """
    n = comp.n_res
    options = comp.options
    caps = comp.caps
    slots = comp.slots
    demand = comp.demand
    wheel = comp.wheel
    prio = comp.prio
    sh_cap = comp.sh_cap
    rank = comp.rank
    enforce_w = comp.enforce_wheelchair
    enforce_s = comp.enforce_shelter
    makespan = comp.makespan
    total_weight = comp.total_weight

    groups: list[list[int]] = [[] for _ in range(comp.n_rp)]
    load = [0] * n
    shelter_of = [-1] * n
    sh_sum = [0] * comp.n_sh
    cov = [0] * comp.n_rp
    times_stack: list[int] = []
    vec: list[tuple[int, int] | None] = [None] * n
    sum_prio_cov = 0
    time_sum = 0
    assigned = 0
    zero = 0
    over = 0

    def set_member(p: int, r: int, s: int, adding: bool) -> None:
        nonlocal sum_prio_cov, zero, over
        grp = groups[p]
        for m in grp:
            l = load[m]
            if l:
                sm = shelter_of[m]
                old = sh_sum[sm]
                new = old - l
                sh_sum[sm] = new
                if old > sh_cap[sm] >= new:
                    over -= 1
            else:
                zero -= 1
        sum_prio_cov -= prio[p] * cov[p]
        if adding:
            rkp = rank[p]
            rk = rkp[r]
            lo, hi = 0, len(grp)
            while lo < hi:
                mid = (lo + hi) // 2
                if rkp[grp[mid]] < rk:
                    lo = mid + 1
                else:
                    hi = mid
            grp.insert(lo, r)
            shelter_of[r] = s
        else:
            grp.remove(r)
            load[r] = 0
            shelter_of[r] = -1
        if enforce_w:
            rem_w = wheel[p]
            rem_a = demand[p] - rem_w
        else:
            rem_w = 0
            rem_a = demand[p]
        c = 0
        for m in grp:
            sl = slots[m]
            w = rem_w if rem_w < sl else sl
            rem_w -= w
            a = caps[m] - w
            if a > rem_a:
                a = rem_a
            rem_a -= a
            l = w + a
            load[m] = l
            if l:
                sm = shelter_of[m]
                old = sh_sum[sm]
                new = old + l
                sh_sum[sm] = new
                if new > sh_cap[sm] >= old:
                    over += 1
            else:
                zero += 1
            c += l
        cov[p] = c
        sum_prio_cov += prio[p] * c

    sh_delta = [0] * comp.n_sh
    touched: list[int] = []

    def eval_virtual(p: int, r: int, s: int, t: int) -> tuple[int, int, int] | None:
        """Objective if ``r`` were additionally assigned (p, s); None when the
        resulting leaf is infeasible.  Leaves the shared state untouched."""
        grp = groups[p]
        rkp = rank[p]
        rk = rkp[r]
        if enforce_w:
            rem_w = wheel[p]
            rem_a = demand[p] - rem_w
        else:
            rem_w = 0
            rem_a = demand[p]
        c = 0
        zero_new = 0
        zero_old = 0
        inserted = False
        i = 0
        length = len(grp)
        while True:
            if not inserted and (i == length or rkp[grp[i]] > rk):
                m = r
                sm = s
                old_l = 0
                inserted = True
            elif i < length:
                m = grp[i]
                sm = shelter_of[m]
                old_l = load[m]
                if old_l == 0:
                    zero_old += 1
                i += 1
            else:
                break
            sl = slots[m]
            w = rem_w if rem_w < sl else sl
            rem_w -= w
            a = caps[m] - w
            if a > rem_a:
                a = rem_a
            rem_a -= a
            l = w + a
            if l == 0:
                zero_new += 1
            c += l
            d = l - old_l
            if d:
                if sh_delta[sm] == 0:
                    touched.append(sm)
                sh_delta[sm] += d
        over_new = over
        for sm in touched:
            d = sh_delta[sm]
            sh_delta[sm] = 0
            old_sum = sh_sum[sm]
            new_sum = old_sum + d
            cap = sh_cap[sm]
            if new_sum > cap >= old_sum:
                over_new += 1
            elif old_sum > cap >= new_sum:
                over_new -= 1
        touched.clear()
        if zero - zero_old + zero_new or (over_new and enforce_s):
            return None
        if makespan:
            tp = max(times_stack) if times_stack else 0
            tp = tp if tp > t else t
        else:
            tp = time_sum + t
        new_prio_cov = sum_prio_cov + prio[p] * (c - cov[p])
        return (total_weight - new_prio_cov, tp, assigned + 1)

    last = n - 1

    def rec(r: int) -> None:
        nonlocal time_sum, assigned
        if r == n:
            if zero == 0 and (over == 0 or not enforce_s):
                tp = (max(times_stack) if times_stack else 0) if makespan else time_sum
                on_leaf((total_weight - sum_prio_cov, tp, assigned), vec)
            return
        if r == last:
            # The bottom level holds almost every leaf: evaluate each option
            # against the current state without mutating it.
            if zero == 0 and (over == 0 or not enforce_s):
                tp = (max(times_stack) if times_stack else 0) if makespan else time_sum
                on_leaf((total_weight - sum_prio_cov, tp, assigned), vec)
            for p, s, t in options[r]:
                obj = eval_virtual(p, r, s, t)
                if obj is not None:
                    vec[r] = (p, s)
                    on_leaf(obj, vec)
                    vec[r] = None
            return
        nxt = r + 1
        rec(nxt)
        for p, s, t in options[r]:
            set_member(p, r, s, True)
            time_sum += t
            assigned += 1
            if makespan:
                times_stack.append(t)
            vec[r] = (p, s)
            rec(nxt)
            set_member(p, r, s, False)
            time_sum -= t
            assigned -= 1
            if makespan:
                times_stack.pop()
            vec[r] = None

    rec(0)


def enumerate_all(instance: ProblemInstance) -> list[tuple[RecommendationPlan, tuple[int, int, int]]]:
    """Every feasible plan with its objective, for ground-truth comparisons.

    Guarded by the oracle scale; loads follow the standard loading rule, and
    plans in which an assigned resource would carry nobody are not feasible.
    """
    _check_oracle_scale(instance)
    comp = _Compiled(instance)
    out: list[tuple[RecommendationPlan, tuple[int, int, int]]] = []

    def on_leaf(objective, vec):
        plan = _materialize(instance, comp, list(vec), solver="exact")
        out.append((plan, objective))

    _enumerate(comp, on_leaf)
    return out


def enumeration_minimum(instance: ProblemInstance, makespan: bool = False) -> tuple[int, int, int]:
    """Lexicographic minimum objective over the full plan space.

    Streaming variant of ``enumerate_all`` used as the solver oracle; it never
    materializes plans, so large batches stay cheap on memory.
    """
    _check_oracle_scale(instance)
    comp = _Compiled(instance, makespan=makespan)
    best: list[tuple[int, int, int] | None] = [None]

    def on_leaf(objective, _vec):
        if best[0] is None or objective < best[0]:
            best[0] = objective

    _enumerate(comp, on_leaf)
    assert best[0] is not None  # the empty plan is always feasible
    return best[0]


# ---------------------------------------------------------------------------
# Exact solver: branch and bound over the same plan space
# ---------------------------------------------------------------------------


def _pour_bound(comp: _Compiled, state: _SearchState, pool: int) -> int:
    """Optimistic (lower-bound) uncovered weight from this node.

    Dedicated capacities stay at their rescue points; the undecided capacity
    pool is poured fractionally into the highest priorities first, ignoring
    admissibility and wheelchair slots, so the result never exceeds the true
    achievable minimum.
    """
    covered_weight = 0
    for p in comp.prio_order:
        cov = comp.demand[p] if state.ded[p] > comp.demand[p] else state.ded[p]
        room = comp.demand[p] - cov
        if pool > 0 and room > 0:
            take = room if room < pool else pool
            cov += take
            pool -= take
        covered_weight += comp.prio[p] * cov
    return comp.total_weight - covered_weight


def _branch_and_bound(comp: _Compiled) -> list[tuple[int, int] | None]:
    """Return the optimal assignment vector under the lexicographic objective,
    final ties broken by the smallest sorted (resource, rp, shelter) id list."""
    state = _SearchState(comp)
    n = comp.n_res
    res_ids, rp_ids, sh_ids = comp.res_ids, comp.rp_ids, comp.sh_ids
    # Explore cheap assignments first so good incumbents appear early.
    ordered_options = [
        sorted(comp.options[r], key=lambda pst: (pst[2], pst[0], pst[1])) for r in range(n)
    ]
    suffix_pool = [0] * (n + 1)
    for r in range(n - 1, -1, -1):
        suffix_pool[r] = suffix_pool[r + 1] + comp.caps[r]

    vec: list[tuple[int, int] | None] = [None] * n
    best_obj = (comp.total_weight, 0, 0)  # the empty plan, always feasible
    best_key: tuple = ()
    best_vec: list[tuple[int, int] | None] = [None] * n

    def make_key() -> tuple:
        return tuple(
            sorted(
                (res_ids[r], rp_ids[ps[0]], sh_ids[ps[1]])
                for r, ps in enumerate(vec)
                if ps is not None
            )
        )

    def rec(r: int) -> None:
        nonlocal best_obj, best_key, best_vec
        if r == n:
            if not state.valid():
                return
            obj = state.objective()
            if obj < best_obj:
                best_obj, best_key, best_vec = obj, make_key(), vec.copy()
            elif obj == best_obj:
                key = make_key()
                if key < best_key:
                    best_key, best_vec = key, vec.copy()
            return
        lb_u = _pour_bound(comp, state, suffix_pool[r])
        time_part = max(state.times_stack, default=0) if comp.makespan else state.time_sum
        if (lb_u, time_part, state.assigned_count) > best_obj:
            return
        push = state.push
        pop = state.pop
        for p, s, _ in ordered_options[r]:
            push(r, p, s)
            vec[r] = (p, s)
            rec(r + 1)
            pop(r, p, s)
            vec[r] = None
        rec(r + 1)

    rec(0)
    return best_vec


# ---------------------------------------------------------------------------
# Greedy fallback for instances above the exact bound
# ---------------------------------------------------------------------------


def _greedy_vector(comp: _Compiled) -> list[tuple[int, int] | None]:
    """Priority-then-time greedy assignment, repaired to feasibility."""
    n = comp.n_res
    vec: list[tuple[int, int] | None] = [None] * n
    used = [False] * n
    rem_demand = list(comp.demand)
    sh_room = list(comp.sh_cap) if comp.enforce_shelter else [math.inf] * comp.n_sh
    opts_by_rp: list[dict[int, list[int]]] = []
    for r in range(n):
        by_rp: dict[int, list[int]] = {}
        for p, s, _ in comp.options[r]:
            by_rp.setdefault(p, []).append(s)
        opts_by_rp.append(by_rp)

    for p in comp.prio_order:
        while rem_demand[p] > 0:
            candidates = sorted(
                (r for r in range(n) if not used[r] and p in opts_by_rp[r]),
                key=lambda r: (comp.t1[r][p], comp.res_ids[r]),
            )
            progressed = False
            for r in candidates:
                shelters = [
                    s for s in opts_by_rp[r][p] if sh_room[s] >= 1
                ]
                if not shelters:
                    continue
                s = min(shelters, key=lambda s: (comp.t2[p][s], comp.sh_ids[s]))
                vec[r] = (p, s)
                used[r] = True
                take = min(comp.caps[r], rem_demand[p], sh_room[s])
                rem_demand[p] -= take
                sh_room[s] -= take
                progressed = True
                break
            if not progressed:
                break

    # Repair: honest loads may zero out an assignment or overflow a shelter;
    # drop offending assignments until the plan is feasible.
    while True:
        state = _SearchState(comp)
        for r, ps in enumerate(vec):
            if ps is not None:
                state.push(r, ps[0], ps[1])
        if state.valid():
            return vec
        victim = None
        for r in range(n - 1, -1, -1):
            if vec[r] is None:
                continue
            if state.load[r] == 0:
                victim = r
                break
            s = vec[r][1]
            if comp.enforce_shelter and state.sh_sum[s] > comp.sh_cap[s]:
                victim = r if victim is None else victim
        assert victim is not None
        vec[victim] = None


def _fractional_time_bound(comp: _Compiled, uncovered_weight: int) -> int:
    """Lower bound on total travel time of any plan whose uncovered weight is
    at most ``uncovered_weight``.

    Any such plan must move at least ``c_min`` people, where ``c_min`` counts
    the highest-priority demand units needed to reach the implied coverage
    weight; carrying ``c_min`` people costs at least the fractional-knapsack
    minimum over per-resource best trip times.
    """
    target = comp.total_weight - uncovered_weight
    if target <= 0:
        return 0
    units = sorted(
        (comp.prio[p] for p in range(comp.n_rp) for _ in range(comp.demand[p])),
        reverse=True,
    )
    c_min = 0
    acc = 0
    for weight in units:
        acc += weight
        c_min += 1
        if acc >= target:
            break
    items = []
    for r in range(comp.n_res):
        if not comp.options[r]:
            continue
        best_trip = min(t for _, _, t in comp.options[r])
        items.append((best_trip / comp.caps[r], best_trip, comp.caps[r], comp.res_ids[r]))
    if comp.makespan:
        return min((trip for _, trip, _, _ in items), default=0) if c_min > 0 else 0
    items.sort(key=lambda it: (it[0], it[3]))
    cost = 0.0
    need = c_min
    for _, trip, cap, _ in items:
        if need <= 0:
            break
        use = cap if cap < need else need
        cost += trip * (use / cap)
        need -= use
    return int(math.floor(cost))


# ---------------------------------------------------------------------------
# Plan construction and the public solve entry point
# ---------------------------------------------------------------------------


def _materialize(
    instance: ProblemInstance,
    comp: _Compiled,
    vec: Sequence[tuple[int, int] | None],
    solver: str,
    lower_bound_s: int | None = None,
) -> RecommendationPlan:
    groups: dict[int, list[int]] = {}
    for r, ps in enumerate(vec):
        if ps is not None:
            groups.setdefault(ps[0], []).append(r)
    assignments: list[Assignment] = []
    covered = [0] * comp.n_rp
    wheel_covered = [0] * comp.n_rp
    for p, members in groups.items():
        loads = load_rule(
            [
                (comp.res_ids[r], comp.t1[r][p], comp.caps[r], comp.slots[r])
                for r in members
            ],
            comp.demand[p],
            comp.wheel[p],
            enforce_wheelchair=comp.enforce_wheelchair,
        )
        for r in members:
            loaded, wheel = loads[comp.res_ids[r]]
            s = vec[r][1]
            covered[p] += loaded
            wheel_covered[p] += wheel
            assignments.append(
                Assignment(
                    resource=comp.res_ids[r],
                    rescue_point=comp.rp_ids[p],
                    shelter=comp.sh_ids[s],
                    evacuees_loaded=loaded,
                    wheelchair_loaded=wheel,
                    t_to_rp=comp.t1[r][p],
                    t_rp_to_shelter=comp.t2[p][s],
                )
            )
    assignments.sort(key=lambda a: a.resource)
    uncovered = tuple(
        (comp.rp_ids[p], comp.demand[p] - covered[p], comp.wheel[p] - wheel_covered[p])
        for p in range(comp.n_rp)
        if comp.demand[p] - covered[p] > 0
    )
    uncovered_weight = sum(
        comp.prio[p] * (comp.demand[p] - covered[p]) for p in range(comp.n_rp)
    )
    if comp.makespan:
        time_part = max((a.t_to_rp + a.t_rp_to_shelter for a in assignments), default=0)
    else:
        time_part = sum(a.t_to_rp + a.t_rp_to_shelter for a in assignments)
    objective = (uncovered_weight, time_part, len(assignments))
    if not assignments:
        status = PlanStatus.EMPTY
    elif uncovered:
        status = PlanStatus.PARTIAL_COVERAGE
    else:
        status = PlanStatus.FULL_COVERAGE
    return RecommendationPlan(
        assignments=tuple(assignments),
        objective=objective,
        uncovered=uncovered,
        status=status,
        solver=solver,
        lower_bound_s=lower_bound_s,
    )


def solve(instance: ProblemInstance, config: SolverConfig | None = None) -> RecommendationPlan:
    """Compute the recommended plan for an instance.

    Exact (branch and bound over the full plan space) when the resource count
    is within ``config.exact_bound``; otherwise a flagged greedy heuristic with
    a lower bound on total travel time.
    """
    config = config or SolverConfig()
    comp = _Compiled(instance, makespan=config.makespan)
    if comp.n_res <= config.exact_bound:
        vec = _branch_and_bound(comp)
        return _materialize(instance, comp, vec, solver="exact")
    vec = _greedy_vector(comp)
    plan = _materialize(instance, comp, vec, solver="heuristic")
    lb = _fractional_time_bound(comp, plan.objective[0])
    return RecommendationPlan(
        assignments=plan.assignments,
        objective=plan.objective,
        uncovered=plan.uncovered,
        status=plan.status,
        solver="heuristic",
        lower_bound_s=lb,
    )


# ---------------------------------------------------------------------------
# Feasibility checking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    code: str
    entities: tuple[str, ...]
    message: str


@dataclass(frozen=True)
class FeasibilityReport:
    ok: bool
    violations: tuple[Violation, ...]


def check_feasible(instance: ProblemInstance, plan: RecommendationPlan) -> FeasibilityReport:
    """Validate a plan against every constraint; one record per violation."""
    res_by_id = {r.id: r for r in instance.resources}
    rp_by_id = {p.id: p for p in instance.rescue_points}
    sh_by_id = {s.id: s for s in instance.shelters}
    con = instance.constraints
    violations: list[Violation] = []

    seen: set[str] = set()
    rp_loads: dict[str, int] = {}
    rp_wheel: dict[str, int] = {}
    sh_loads: dict[str, int] = {}
    for a in plan.assignments:
        if a.resource not in res_by_id:
            raise UnknownEntity(f"plan references unknown resource {a.resource!r}")
        if a.rescue_point not in rp_by_id:
            raise UnknownEntity(f"plan references unknown rescue point {a.rescue_point!r}")
        if a.shelter not in sh_by_id:
            raise UnknownEntity(f"plan references unknown shelter {a.shelter!r}")
        res = res_by_id[a.resource]
        rp = rp_by_id[a.rescue_point]
        if a.resource in seen:
            violations.append(
                Violation("single_use", (a.resource,), f"resource {a.resource} used more than once")
            )
        seen.add(a.resource)
        if a.evacuees_loaded < 1:
            violations.append(
                Violation("empty_load", (a.resource,), f"assignment of {a.resource} carries nobody")
            )
        if a.evacuees_loaded > res.capacity:
            violations.append(
                Violation(
                    "capacity_exceeded",
                    (a.resource,),
                    f"{a.evacuees_loaded} evacuees exceed capacity {res.capacity} of {a.resource}",
                )
            )
        if not 0 <= a.wheelchair_loaded <= a.evacuees_loaded:
            violations.append(
                Violation(
                    "load_shape",
                    (a.resource,),
                    f"wheelchair load {a.wheelchair_loaded} inconsistent with total {a.evacuees_loaded}",
                )
            )
        if con.enforce_wheelchair and a.wheelchair_loaded > res.vehicle.wheelchair_slots:
            violations.append(
                Violation(
                    "wheelchair_slots_exceeded",
                    (a.resource,),
                    f"{a.wheelchair_loaded} wheelchair evacuees exceed "
                    f"{res.vehicle.wheelchair_slots} slots of {a.resource}",
                )
            )
        if con.enforce_terrain:
            allowed = rp.required_terrains if rp.required_terrains is not None else ALL_TERRAINS
            if res.vehicle.terrain not in allowed:
                violations.append(
                    Violation(
                        "terrain_mismatch",
                        (a.resource, a.rescue_point),
                        f"vehicle terrain {res.vehicle.terrain.value} not usable at {a.rescue_point}",
                    )
                )
        t1 = instance.times_to_rp.get(a.resource, a.rescue_point)
        t2 = instance.times_rp_to_shelter.get(a.rescue_point, a.shelter)
        if t1 is None or t2 is None:
            violations.append(
                Violation(
                    "unreachable",
                    (a.resource, a.rescue_point, a.shelter),
                    "assignment uses an unreachable leg",
                )
            )
        rp_loads[a.rescue_point] = rp_loads.get(a.rescue_point, 0) + a.evacuees_loaded
        rp_wheel[a.rescue_point] = rp_wheel.get(a.rescue_point, 0) + a.wheelchair_loaded
        sh_loads[a.shelter] = sh_loads.get(a.shelter, 0) + a.evacuees_loaded

    for rp_id, total in rp_loads.items():
        rp = rp_by_id[rp_id]
        if total > rp.evacuees:
            violations.append(
                Violation("over_demand", (rp_id,), f"{total} loaded exceeds demand {rp.evacuees} at {rp_id}")
            )
        if con.enforce_wheelchair and rp_wheel[rp_id] > rp.wheelchair_evacuees:
            violations.append(
                Violation(
                    "over_demand",
                    (rp_id,),
                    f"{rp_wheel[rp_id]} wheelchair loaded exceeds demand "
                    f"{rp.wheelchair_evacuees} at {rp_id}",
                )
            )
    if con.enforce_shelter_capacity:
        for sh_id, total in sh_loads.items():
            if total > sh_by_id[sh_id].capacity:
                violations.append(
                    Violation(
                        "shelter_over_capacity",
                        (sh_id,),
                        f"{total} incoming exceed capacity {sh_by_id[sh_id].capacity} of {sh_id}",
                    )
                )
    return FeasibilityReport(ok=not violations, violations=tuple(violations))


# ---------------------------------------------------------------------------
# Rationale records for decision support
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AssignmentRationale:
    resource: str
    rescue_point: str
    shelter: str
    t_to_rp: int
    t_rp_to_shelter: int
    total_s: int
    evacuees_loaded: int
    wheelchair_loaded: int
    capacity: int
    wheelchair_slots: int
    binding: tuple[str, ...]


@dataclass(frozen=True)
class ShortageRationale:
    rescue_point: str
    evacuees_left: int
    wheelchair_left: int
    reason: str
    fleet_capacity: int


@dataclass(frozen=True)
class Explanation:
    assignments: tuple[AssignmentRationale, ...]
    shortages: tuple[ShortageRationale, ...]


def explain(instance: ProblemInstance, plan: RecommendationPlan) -> Explanation:
    """Per-assignment rationale plus the binding shortage per uncovered point."""
    res_by_id = {r.id: r for r in instance.resources}
    rp_by_id = {p.id: p for p in instance.rescue_points}
    rp_loads: dict[str, int] = {}
    for a in plan.assignments:
        rp_loads[a.rescue_point] = rp_loads.get(a.rescue_point, 0) + a.evacuees_loaded

    rationales = []
    for a in plan.assignments:
        res = res_by_id[a.resource]
        rp = rp_by_id[a.rescue_point]
        binding = []
        if a.evacuees_loaded == res.capacity:
            binding.append("capacity")
        if rp_loads[a.rescue_point] >= rp.evacuees:
            binding.append("demand")
        if (
            instance.constraints.enforce_wheelchair
            and a.wheelchair_loaded == res.vehicle.wheelchair_slots
            and res.vehicle.wheelchair_slots > 0
        ):
            binding.append("wheelchair_slots")
        rationales.append(
            AssignmentRationale(
                resource=a.resource,
                rescue_point=a.rescue_point,
                shelter=a.shelter,
                t_to_rp=a.t_to_rp,
                t_rp_to_shelter=a.t_rp_to_shelter,
                total_s=a.t_to_rp + a.t_rp_to_shelter,
                evacuees_loaded=a.evacuees_loaded,
                wheelchair_loaded=a.wheelchair_loaded,
                capacity=res.capacity,
                wheelchair_slots=res.vehicle.wheelchair_slots,
                binding=tuple(binding),
            )
        )

    fleet_capacity = sum(r.capacity for r in instance.resources)
    comp = _Compiled(instance)
    shortages = []
    for rp_id, left, wheel_left in plan.uncovered:
        p = comp.rp_ids.index(rp_id)
        reachable = [r for r in range(comp.n_res) if any(po == p for po, _, _ in comp.options[r])]
        if not reachable:
            reason = "no_admissible_resource"
        elif wheel_left > 0 and sum(comp.slots[r] for r in reachable) < comp.wheel[p]:
            reason = "wheelchair_slots_insufficient"
        else:
            reason = "fleet_capacity_exhausted"
        shortages.append(
            ShortageRationale(
                rescue_point=rp_id,
                evacuees_left=left,
                wheelchair_left=wheel_left,
                reason=reason,
                fleet_capacity=fleet_capacity,
            )
        )
    return Explanation(assignments=tuple(rationales), shortages=tuple(shortages))


# ---------------------------------------------------------------------------
# Plan serialization
# ---------------------------------------------------------------------------


def plan_to_json_dict(plan: RecommendationPlan) -> dict:
    out = {
        "assignments": [
            {
                "resource": a.resource,
                "rescue_point": a.rescue_point,
                "shelter": a.shelter,
                "evacuees_loaded": a.evacuees_loaded,
                "wheelchair_loaded": a.wheelchair_loaded,
                "t_to_rp": a.t_to_rp,
                "t_rp_to_shelter": a.t_rp_to_shelter,
            }
            for a in plan.assignments
        ],
        "objective": {
            "uncovered_weight": plan.objective[0],
            "total_time": plan.objective[1],
            "vehicles_used": plan.objective[2],
        },
        "uncovered": {
            rp: {"evacuees_left": left, "wheelchair_left": wheel}
            for rp, left, wheel in plan.uncovered
        },
        "status": plan.status.value,
        "solver": plan.solver,
    }
    if plan.solver == "heuristic":
        out["lower_bound_s"] = plan.lower_bound_s
    return out
