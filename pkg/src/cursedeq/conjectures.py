"""Conjectures: coarse beliefs about opponents attached to information sets.

A conjecture for an information set I is a profile of partial strategies
covering every information set compatible with I.  It is cursed-plausible
with a strategy profile when the owner's own part accords with their
strategy, opponent parts are coarse, and each opponent action probability
matches its empirical frequency conditional on jointly reaching I and the
opponent's coarse cell, whenever that event has positive probability.
Cursed-consistent conjectures arise as limits of the unique cursed-plausible
conjectures along a vanishing tremble path of fully mixed profiles.
"""

from __future__ import annotations

from dataclasses import dataclass

from .partition import CoarsePartition, is_coarse
from .tree import (BehaviorProfile, GameError, GameTree, ZeroProbabilityError,
                   node_reach, own_action_toward)

CHECK_TOL = 1e-6


@dataclass
class Conjecture:
    """Partial-strategy profile attached to one information set."""

    owner: str
    dists: dict[str, dict[str, float]]

    def copy(self) -> "Conjecture":
        return Conjecture(self.owner, {i: dict(d) for i, d in self.dists.items()})

    def distance(self, other: "Conjecture") -> float:
        gaps = [1.0 for i in self.dists if i not in other.dists]
        gaps += [1.0 for i in other.dists if i not in self.dists]
        gaps += [abs(p - other.dists[i][a])
                 for i, d in self.dists.items() if i in other.dists
                 for a, p in d.items()]
        return max(gaps, default=0.0)


ConjectureSystem = dict  # owner info-set id -> Conjecture


@dataclass(frozen=True)
class Belief:
    """Distribution over the nodes of one information set."""

    info_set: str
    probs: dict[str, float]


def compatible(tree: GameTree, iid: str, jid: str) -> bool:
    """True iff some node of one set weakly precedes some node of the other."""
    a = tree.info_sets.get(iid)
    b = tree.info_sets.get(jid)
    if a is None or b is None:
        raise GameError(f"unknown info set {iid!r} or {jid!r}")
    if iid == jid:
        return True
    for h in a.nodes:
        for g in b.nodes:
            if tree.precedes(h, g) or tree.precedes(g, h):
                return True
    return False


def _owner_geometry(tree: GameTree, reach: dict[str, float], owner_nodes):
    """One pass over the tree relative to an owner information set.

    Returns, per node, the probability mass of terminals below it whose path
    passes through the owner set, plus the weakly-below flags and the
    ancestor set used for fast compatibility tests.
    """
    marked = set(owner_nodes)
    below_flag = {}
    order = tree.nodes
    for n in order:
        p = tree.parent[n]
        below_flag[n] = n in marked or (p is not None and below_flag[p])
    ancestors = set()
    for h in owner_nodes:
        ancestors.update(tree.ancestors(h))
    mass = {}
    for n in reversed(order):
        if below_flag[n]:
            mass[n] = reach[n]
        elif tree.is_terminal(n):
            mass[n] = 0.0
        else:
            mass[n] = sum(mass[c] for c in tree.children[n].values())
    return mass, below_flag, ancestors


def _mass_through(tree: GameTree, reach: dict[str, float], owner_nodes) -> dict[str, float]:
    """Probability mass below each node restricted to paths through the owner set."""
    mass, _, _ = _owner_geometry(tree, reach, owner_nodes)
    return mass


def cursed_conjecture(tree: GameTree, partition: CoarsePartition,
                      profile: BehaviorProfile, owner: str,
                      require_mixed: bool = True) -> Conjecture:
    """The unique cursed-plausible conjecture at ``owner`` for a fully mixed
    profile: own play accords with the profile, every other participant's
    play at a compatible set equals the empirical action frequency of its
    coarse cell conditional on jointly reaching the owner set and the cell.

    ``require_mixed=False`` admits profiles with pure entries, as needed for
    per-action conjectures; cells whose joint event then has probability
    zero simply drop out of the domain.
    """
    if require_mixed and not profile.is_fully_mixed():
        raise GameError("cursed conjecture requires a fully mixed profile")
    oset = tree.info_sets[owner]
    player = oset.player
    full = profile.full(tree)
    reach = node_reach(tree, full)
    mass, below, ancestors = _owner_geometry(tree, reach, oset.nodes)

    def touches(nodes):
        return any(below[n] or n in ancestors for n in nodes)

    cell_freq = {}
    for cid, nodes in partition.cells.items():
        if partition.owner[cid] == player:
            continue
        denom = sum(mass[g] for g in nodes)
        if denom <= 0.0:
            continue
        freq = {}
        for a in partition.actions[cid]:
            freq[a] = sum(mass[tree.children[g][a]] for g in nodes) / denom
        cell_freq[cid] = freq

    dists = {}
    for iid, iset in tree.info_sets.items():
        if not touches(iset.nodes):
            continue
        if iset.player == player:
            if iid == owner:
                dists[iid] = dict(profile.dists[iid])
            else:
                forced = _forced_action(tree, iset, oset)
                if forced is not None:
                    dists[iid] = {a: (1.0 if a == forced else 0.0) for a in iset.actions}
                else:
                    dists[iid] = dict(profile.dists[iid])
            continue
        cid = partition.cell_of[iset.nodes[0]]
        if cid in cell_freq:
            dists[iid] = dict(cell_freq[cid])
    return Conjecture(owner, dists)


def _forced_action(tree: GameTree, iset, owner_set):
    """If ``iset`` precedes the owner's set, the unique action at ``iset``
    that keeps the owner's set reachable (perfect recall makes it unique)."""
    for h in owner_set.nodes:
        pred = h
        while True:
            pred = tree.parent[pred]
            if pred is None:
                break
            if tree.info_set_of.get(pred) == iset.id:
                return own_action_toward(tree, pred, h)
    return None


def accords_with(tree: GameTree, conjecture: Conjecture,
                 profile: BehaviorProfile, tol: float = CHECK_TOL) -> list[str]:
    """Violations of clause 1: own partial strategy must force the actions
    leading to the owner set at own predecessors and copy the strategy
    elsewhere."""
    oset = tree.info_sets[conjecture.owner]
    problems = []
    for iid, dist in conjecture.dists.items():
        iset = tree.info_sets[iid]
        if iset.player != oset.player:
            continue
        forced = None if iid == conjecture.owner else _forced_action(tree, iset, oset)
        if forced is not None:
            if abs(dist.get(forced, 0.0) - 1.0) > tol:
                problems.append(f"{iid}: must force {forced!r} toward {conjecture.owner}")
        else:
            base = profile.dists[iid]
            if any(abs(dist.get(a, 0.0) - base[a]) > tol for a in base):
                problems.append(f"{iid}: does not match the base strategy")
    return problems


@dataclass(frozen=True)
class PlausibilityIssue:
    owner: str
    clause: int
    where: str
    detail: str


@dataclass(frozen=True)
class PlausibilityReport:
    issues: tuple[PlausibilityIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.issues

    def __str__(self) -> str:
        if self.ok:
            return "cursed-plausible"
        return "\n".join(f"[{i.owner}] clause {i.clause} at {i.where}: {i.detail}"
                         for i in self.issues)


def check_cursed_plausible(tree: GameTree, partition: CoarsePartition,
                           profile: BehaviorProfile, system: ConjectureSystem,
                           tol: float = CHECK_TOL) -> PlausibilityReport:
    """Three-clause test of cursed plausibility for a whole system.

    Clause 2 is only enforced where the joint event (owner set, coarse cell)
    has positive probability under the profile itself.
    """
    issues = []
    full = profile.full(tree)
    reach = node_reach(tree, full)
    for owner, conj in system.items():
        oset = tree.info_sets[owner]
        for p in accords_with(tree, conj, profile, tol):
            issues.append(PlausibilityIssue(owner, 1, p.split(":")[0], p))

        mass = _mass_through(tree, reach, oset.nodes)
        for iid, dist in conj.dists.items():
            iset = tree.info_sets[iid]
            if iset.player == oset.player:
                continue
            cid = partition.cell_of[iset.nodes[0]]
            denom = sum(mass[g] for g in partition.cells[cid])
            if denom <= 0.0:
                continue
            for a in iset.actions:
                emp = sum(mass[tree.children[g][a]] for g in partition.cells[cid]) / denom
                if abs(dist.get(a, 0.0) - emp) > tol:
                    issues.append(PlausibilityIssue(
                        owner, 2, iid,
                        f"action {a!r} conjectured {dist.get(a, 0.0):.6g}, empirical {emp:.6g}"))

        opponent = {iid: d for iid, d in conj.dists.items()
                    if tree.info_sets[iid].player != oset.player}
        if not is_coarse(opponent, partition, tree, tol):
            issues.append(PlausibilityIssue(owner, 3, "-",
                                            "opponent partial strategy is not coarse"))
    return PlausibilityReport(tuple(issues))


def conjecture_reach(tree: GameTree, conjecture: Conjecture) -> dict[str, float]:
    """Node reach probabilities under the conjecture's own measure."""
    return node_reach(tree, conjecture.dists, strict=False)


def _upward_reach(tree: GameTree, dists, node: str) -> float:
    """Probability of the path to ``node``: the product of the step
    probabilities along its ancestor chain."""
    prob = 1.0
    child = node
    for anc in tree.ancestors(node):
        dist = dists.get(tree.info_set_of[anc])
        if dist is None:
            return 0.0
        prob *= dist.get(tree.action_in[child], 0.0)
        if prob == 0.0:
            return 0.0
        child = anc
    return prob


def belief(tree: GameTree, conjecture: Conjecture) -> Belief:
    """Bayes distribution over the owner's nodes implied by the conjecture."""
    oset = tree.info_sets[conjecture.owner]
    weights = {h: _upward_reach(tree, conjecture.dists, h) for h in oset.nodes}
    total = sum(weights.values())
    if total <= 0.0:
        raise ZeroProbabilityError(
            f"conjecture reaches {conjecture.owner!r} with probability 0")
    return Belief(conjecture.owner, {h: w / total for h, w in weights.items()})


def tremble_path(profile: BehaviorProfile, tree: GameTree, steps: int = 40,
                 scale: float = 0.1):
    """Default vanishing tremble path: geometric mixtures with uniform."""
    uni = BehaviorProfile.uniform(tree)
    return [profile.mix(uni, scale * 0.5 ** k) for k in range(1, steps + 1)]


@dataclass
class LimitDiagnostics:
    converged: dict[str, bool]
    residuals: dict[str, float]
    owner_reach: dict[str, float]

    @property
    def ok(self) -> bool:
        return all(self.converged.values()) and all(r > 0 for r in self.owner_reach.values())


def limit_conjecture_system(tree: GameTree, partition: CoarsePartition,
                            path, target: BehaviorProfile,
                            cauchy_tol: float = 1e-10, cauchy_runs: int = 3,
                            owners=None):
    """Limit of the cursed conjectures along one tremble path.

    The same path justifies every conjecture.  Convergence is certified by a
    Cauchy criterion on successive iterates; the reported limit is the
    two-point Richardson extrapolation of the last two iterates, which is
    exact up to second order for geometrically vanishing trembles.
    """
    path = list(path)
    if not path:
        raise GameError("empty tremble path")
    if path[-1].distance(target) > 1e-6:
        raise GameError("tremble path does not converge to the target profile")
    if owners is None:
        owners = tree.player_info_sets()

    histories = {o: [] for o in owners}
    for prof in path:
        for o in owners:
            histories[o].append(cursed_conjecture(tree, partition, prof, o))

    system = {}
    converged = {}
    residuals = {}
    for o in owners:
        seq = histories[o]
        runs = 0
        dist = float("inf")
        for a, b in zip(seq, seq[1:]):
            dist = a.distance(b)
            runs = runs + 1 if dist < cauchy_tol else 0
        converged[o] = runs >= cauchy_runs
        residuals[o] = dist
        system[o] = _extrapolate(seq[-2], seq[-1]) if len(seq) > 1 else seq[-1]

    owner_reach = {}
    for o, conj in system.items():
        owner_reach[o] = sum(_upward_reach(tree, conj.dists, h)
                             for h in tree.info_sets[o].nodes)

    return system, LimitDiagnostics(converged, residuals, owner_reach)


def _extrapolate(prev: Conjecture, last: Conjecture) -> Conjecture:
    """Richardson step for a geometrically halving tremble: 2*last - prev."""
    dists = {}
    for iid, d in last.dists.items():
        p = prev.dists.get(iid)
        if p is None:
            dists[iid] = dict(d)
            continue
        dists[iid] = {a: min(1.0, max(0.0, 2.0 * v - p[a])) for a, v in d.items()}
    return Conjecture(last.owner, dists)
