"""Equilibrium computation for the cursedness family of concepts.

The driver follows the existence construction: a probability-floor homotopy
whose stages are approximate fixed points of the floor-constrained cursed
best-response map, found by damped simultaneous iteration with seeded
restarts.  Interior mixing defeats plain damped iteration, so after the
floor schedule the solver detects the support and solves the exact
indifference conditions of the limit conjectures with a Newton-type root
finder, then certifies local best responses under the extrapolated limits.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from scipy import optimize

from .bestresponse import Scenario, _floor_dist, check_local_best_response, optimize_plan
from .conjectures import (Conjecture, belief, check_cursed_plausible, cursed_conjecture,
                          limit_conjecture_system, tremble_path)
from .games import ComputerPlayerSet
from .partition import CoarsePartition
from .tree import BehaviorProfile, GameError, GameTree, node_reach


class NonConvergenceError(GameError):
    """Solver failed after all restarts; carries the best gap found."""

    def __init__(self, message, best_gap=None, gaps=None):
        super().__init__(message)
        self.best_gap = best_gap
        self.gaps = gaps or {}


@dataclass
class SolverConfig:
    eps_start: float = 0.1
    eps_decay: float = 0.5
    eps_floor: float = 1e-8
    damping: float = 0.5
    fp_tol: float = 1e-9
    gap_tol: float = 1e-8
    tie_tol: float = 1e-9
    max_iters: int = 80
    restarts: int = 20
    seed: int = 0
    polish: bool = True
    limit_steps: int = 40

    def __post_init__(self):
        if not self.eps_floor > 0:
            raise GameError("eps floor must be positive")
        if not 0 < self.damping <= 1:
            raise GameError("damping must lie in (0, 1]")
        if min(self.fp_tol, self.gap_tol, self.tie_tol) <= 0:
            raise GameError("tolerances must be positive")

    def schedule(self, max_actions: int = 2):
        """Geometric floor schedule; the start shrinks if some information
        set has too many actions for the floor to be feasible."""
        eps = min(self.eps_start, 0.5 / max_actions)
        out = []
        while eps > self.eps_floor:
            out.append(eps)
            eps *= self.eps_decay
        out.append(self.eps_floor)
        return out


@dataclass
class EquilibriumResult:
    concept: str
    profile: BehaviorProfile
    conjectures: dict
    eps_path: list
    gaps: dict[str, float]
    converged: bool
    iterations: int
    seed: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def max_gap(self) -> float:
        return max(self.gaps.values(), default=0.0)

    def to_text(self) -> str:
        """Canonical rendering; identical configs and seeds give identical bytes."""
        lines = [f"concept {self.concept}", f"seed {self.seed}",
                 f"converged {self.converged}", f"max_gap {self.max_gap!r}"]
        for iid in sorted(self.profile.dists):
            entries = " ".join(f"{a}:{p!r}" for a, p in self.profile.dists[iid].items())
            lines.append(f"play {iid} {entries}")
        for key in sorted(self.conjectures, key=str):
            conj = self.conjectures[key]
            for iid in sorted(conj.dists):
                entries = " ".join(f"{a}:{p!r}" for a, p in conj.dists[iid].items())
                lines.append(f"conjecture {key} {iid} {entries}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Q-value oracles (stage versions work on fully mixed iterates)
# ---------------------------------------------------------------------------

def _q_sce_stage(tree, partition, profile, owners, floor, tie_tol):
    out = {}
    for o in owners:
        conj = cursed_conjecture(tree, partition, profile, o)
        b = belief(tree, conj)
        sc = Scenario(1.0, b.probs, conj.dists)
        res = optimize_plan(tree, o, [sc], tree.info_sets[o].player,
                            floor=floor, tie_tol=tie_tol)
        out[o] = res.action_values
    return out


def _bayes_belief(tree, profile, owner):
    reach = node_reach(tree, profile.full(tree))
    nodes = tree.info_sets[owner].nodes
    total = sum(reach[h] for h in nodes)
    if total <= 0.0:
        raise GameError(f"info set {owner!r} unreachable under the profile")
    return {h: reach[h] / total for h in nodes}


def _q_chi_stage(tree, partition, profile, owners, floor, tie_tol, chi):
    out = {}
    full = profile.full(tree)
    for o in owners:
        scenarios = []
        if chi > 0.0:
            conj = cursed_conjecture(tree, partition, profile, o)
            scenarios.append(Scenario(chi, belief(tree, conj).probs, conj.dists))
        if chi < 1.0:
            scenarios.append(Scenario(1.0 - chi, _bayes_belief(tree, profile, o), full))
        res = optimize_plan(tree, o, scenarios, tree.info_sets[o].player,
                            floor=floor, tie_tol=tie_tol)
        out[o] = res.action_values
    return out


def _force_action(profile: BehaviorProfile, owner: str, action: str) -> BehaviorProfile:
    mod = profile.copy()
    mod.dists[owner] = {a: (1.0 if a == action else 0.0)
                        for a in profile.dists[owner]}
    return mod


def _q_causal_stage(tree, partition, profile, owners, floor, tie_tol):
    """One conjecture per available action: the owner evaluates each action
    under the cursed conjecture of the profile modified to play it surely."""
    out = {}
    for o in owners:
        player = tree.info_sets[o].player
        q = {}
        for a in tree.info_sets[o].actions:
            conj = cursed_conjecture(tree, partition, _force_action(profile, o, a), o,
                                     require_mixed=False)
            sc = Scenario(1.0, belief(tree, conj).probs, conj.dists)
            res = optimize_plan(tree, o, [sc], player, floor=floor,
                                tie_tol=tie_tol, forced=a)
            q[a] = res.action_values[a]
        out[o] = q
    return out


# ---------------------------------------------------------------------------
# Limit artifacts: conjectures, beliefs and Q values as trembles vanish
# ---------------------------------------------------------------------------

def _richardson(prev, last):
    return {k: 2.0 * v - prev[k] for k, v in last.items()}


def _limit_bayes_beliefs(tree, path, owners):
    out = {}
    seqs = {o: [] for o in owners}
    for prof in path:
        reach = node_reach(tree, prof.full(tree))
        for o in owners:
            nodes = tree.info_sets[o].nodes
            total = sum(reach[h] for h in nodes)
            seqs[o].append({h: reach[h] / total for h in nodes})
    for o, seq in seqs.items():
        lim = _richardson(seq[-2], seq[-1]) if len(seq) > 1 else seq[-1]
        lim = {h: min(1.0, max(0.0, v)) for h, v in lim.items()}
        total = sum(lim.values())
        out[o] = {h: v / total for h, v in lim.items()}
    return out


class LimitOracle:
    """Q values, conjectures and beliefs in the vanishing-tremble limit.

    All limits come from one geometric tremble path of the candidate profile
    with two-point extrapolation, so the same path justifies every
    conjecture in the reported system.
    """

    def __init__(self, tree, partition, concept, chi, config, frozen_dists):
        self.tree = tree
        self.partition = partition
        self.concept = concept
        self.chi = chi
        self.config = config
        self.frozen_dists = frozen_dists

    def artifacts(self, profile, owners, steps=None):
        steps = steps or self.config.limit_steps
        tree, partition = self.tree, self.partition
        path = tremble_path(profile, tree, steps)
        tie = self.config.tie_tol
        q = {}
        if self.concept == "causal-sce":
            conjs = {}
            for o in owners:
                player = tree.info_sets[o].player
                qo = {}
                for a in tree.info_sets[o].actions:
                    mod_path = [_force_action(p, o, a) for p in path]
                    seq = [cursed_conjecture(tree, partition, p, o, require_mixed=False)
                           for p in mod_path[-2:]]
                    conj = _extrapolate_conjecture(*seq)
                    conjs[(o, a)] = conj
                    sc = Scenario(1.0, belief(tree, conj).probs, conj.dists)
                    res = optimize_plan(tree, o, [sc], player, tie_tol=tie, forced=a)
                    qo[a] = res.action_values[a]
                q[o] = qo
            return q, conjs, {}

        system, diag = limit_conjecture_system(tree, partition, path, profile,
                                               owners=owners)
        bayes = {}
        if self.concept == "chi-sce" and self.chi < 1.0:
            bayes = _limit_bayes_beliefs(tree, path, owners)
        full = profile.full(tree)
        for o in owners:
            conj = system[o]
            player = tree.info_sets[o].player
            scenarios = []
            if self.concept == "chi-sce":
                if self.chi > 0.0:
                    scenarios.append(Scenario(self.chi, belief(tree, conj).probs, conj.dists))
                if self.chi < 1.0:
                    scenarios.append(Scenario(1.0 - self.chi, bayes[o], full))
            else:
                scenarios.append(Scenario(1.0, belief(tree, conj).probs, conj.dists))
            res = optimize_plan(tree, o, scenarios, player, tie_tol=tie)
            q[o] = res.action_values
        return q, system, {"limit_diag": diag, "bayes_beliefs": bayes}


def _extrapolate_conjecture(prev: Conjecture, last: Conjecture) -> Conjecture:
    dists = {}
    for iid, d in last.dists.items():
        p = prev.dists.get(iid, d)
        dists[iid] = {a: min(1.0, max(0.0, 2.0 * v - p.get(a, v))) for a, v in d.items()}
    return Conjecture(last.owner, dists)


# ---------------------------------------------------------------------------
# The homotopy driver
# ---------------------------------------------------------------------------

def _floored(profile, tree, eps, frozen_dists):
    """Clamp a profile into the eps-constrained simplex, frozen players
    included (their prescribed strategy is floored, not re-optimized)."""
    out = {}
    for iid, dist in profile.dists.items():
        base = frozen_dists.get(iid, dist)
        k = len(base)
        out[iid] = {a: eps + (1.0 - eps * k) * p for a, p in base.items()}
    return BehaviorProfile(out)


def _project(profile, tree, eps, frozen_dists):
    """Strip floor-level mass and renormalize; frozen entries stay exact."""
    out = {}
    for iid, dist in profile.dists.items():
        if iid in frozen_dists:
            out[iid] = dict(frozen_dists[iid])
            continue
        kept = {a: p for a, p in dist.items() if p > 5.0 * eps}
        total = sum(kept.values())
        out[iid] = {a: (kept.get(a, 0.0) / total) for a in dist}
    return BehaviorProfile(out)


def _random_profile(tree, rng, frozen_dists):
    dists = {}
    for iid in tree.player_info_sets():
        if iid in frozen_dists:
            dists[iid] = dict(frozen_dists[iid])
            continue
        acts = tree.info_sets[iid].actions
        raw = [rng.random() + 1e-3 for _ in acts]
        s = sum(raw)
        dists[iid] = {a: w / s for a, w in zip(acts, raw)}
    return BehaviorProfile(dists)


def _solve(tree: GameTree, partition: CoarsePartition, config: SolverConfig,
           frozen: ComputerPlayerSet | None, concept: str, chi: float = 1.0):
    frozen_dists = frozen.info_set_dists() if frozen else {}
    owners = sorted(tree.player_info_sets())
    free = [o for o in owners if o not in frozen_dists]

    def q_stage(profile, eps):
        if concept == "chi-sce":
            return _q_chi_stage(tree, partition, profile, free, eps, config.tie_tol, chi)
        if concept == "causal-sce":
            return _q_causal_stage(tree, partition, profile, free, eps, config.tie_tol)
        return _q_sce_stage(tree, partition, profile, free, eps, config.tie_tol)

    oracle = LimitOracle(tree, partition, concept, chi, config, frozen_dists)
    max_actions = max((len(tree.info_sets[o].actions) for o in owners), default=2)
    rng = random.Random(config.seed)
    best_gap, best_gaps = float("inf"), {}
    iterations = 0

    for attempt in range(config.restarts + 1):
        if attempt == 0:
            profile = BehaviorProfile.uniform(tree)
            for iid, d in frozen_dists.items():
                profile.dists[iid] = dict(d)
        else:
            profile = _random_profile(tree, rng, frozen_dists)

        eps_path = []
        for eps in config.schedule(max_actions):
            profile = _floored(profile, tree, eps, frozen_dists)
            avg = {iid: dict(d) for iid, d in profile.dists.items()}
            count = 1
            converged_stage = False
            for _ in range(config.max_iters):
                iterations += 1
                q = q_stage(profile, eps)
                target = profile.copy()
                for o in free:
                    acts = tree.info_sets[o].actions
                    target.dists[o] = _floor_dist(acts, q[o], eps, config.tie_tol,
                                                  incumbent=profile.dists[o])
                resid = profile.distance(target)
                profile = profile.mix(target, config.damping)
                count += 1
                for iid, d in profile.dists.items():
                    acc = avg[iid]
                    for a, p in d.items():
                        acc[a] += (p - acc[a]) / count
                if resid <= max(config.fp_tol, eps * 1e-3):
                    converged_stage = True
                    break
            if not converged_stage:
                # cycling around interior mixing: carry the stage average
                profile = BehaviorProfile({i: dict(d) for i, d in avg.items()})
            eps_path.append((eps, profile.copy()))

        candidate = _project(profile, tree, config.eps_floor, frozen_dists)
        candidate, q_lim, conjs, extras = _finalize(tree, config, oracle, candidate,
                                                    free, frozen_dists)
        gaps = {}
        ok = True
        for o in free:
            support = [a for a, p in candidate.dists[o].items() if p > 0.0]
            best = max(q_lim[o].values())
            gap = max(best - q_lim[o][a] for a in support)
            gaps[o] = gap
            if gap > config.gap_tol:
                ok = False
        if ok:
            return EquilibriumResult(concept, candidate, conjs, eps_path, gaps,
                                     True, iterations, config.seed, extras)
        worst = max(gaps.values(), default=0.0)
        if worst < best_gap:
            best_gap, best_gaps = worst, gaps

    # last resort for stubborn cycles: enumerate supports outright
    if not config.polish:
        raise NonConvergenceError(
            f"{concept} solve failed after {config.restarts + 1} starts "
            f"(best gap {best_gap:.3g})", best_gap, best_gaps)

    def q_fn(assignment):
        prof = BehaviorProfile({iid: dict(d) for iid, d in assignment.items()})
        for iid, d in frozen_dists.items():
            prof.dists[iid] = dict(d)
        q, _, _ = oracle.artifacts(prof, free, steps=20)
        return q

    found = enumerate_support_equilibrium(
        free, lambda o: tree.info_sets[o].actions, q_fn, config.gap_tol)
    if found is not None:
        candidate = BehaviorProfile({iid: dict(d) for iid, d in found.items()})
        for iid, d in frozen_dists.items():
            candidate.dists[iid] = dict(d)
        q_lim, conjs, extras = oracle.artifacts(candidate, free)
        gaps = {}
        for o in free:
            support = [a for a, p in candidate.dists[o].items() if p > 0.0]
            best = max(q_lim[o].values())
            gaps[o] = max(best - q_lim[o][a] for a in support)
        if all(g <= config.gap_tol for g in gaps.values()):
            extras["support_enumeration"] = True
            return EquilibriumResult(concept, candidate, conjs, [], gaps,
                                     True, iterations, config.seed, extras)

    raise NonConvergenceError(
        f"{concept} solve failed after {config.restarts + 1} starts "
        f"(best gap {best_gap:.3g})", best_gap, best_gaps)


def _detect_mixing(dists, q, free, prune):
    """Info sets still mixing after dropping support actions whose value gap
    at the candidate exceeds the pruning threshold."""
    mixing = []
    for o in free:
        support = [a for a, p in dists[o].items() if p > 0.0]
        if prune is not None and o in q:
            best = max(q[o].values())
            kept = [a for a in support if q[o][a] >= best - prune]
            support = kept or support
        if len(support) > 1:
            mixing.append((o, support))
    return mixing


def _finalize(tree, config, oracle, candidate, free, frozen_dists):
    """Support polish: solve the exact indifference conditions of the limit
    conjectures on the detected support, then recompute limit artifacts.

    Damped-iteration averages can leave stray mass on dominated actions;
    failed polishes retry with the support pruned by the value gaps."""
    if config.polish:
        q0, _, _ = oracle.artifacts(candidate, free, steps=20)
        for prune in (None, 1e-3, 1e-6):
            mixing = _detect_mixing(candidate.dists, q0, free, prune)
            if not mixing:
                break
            trial, ok = _polish_once(candidate, mixing, oracle)
            if ok:
                candidate = trial
                break

    q_lim, conjs, extras = oracle.artifacts(candidate, free)
    return candidate, q_lim, conjs, extras


def enumerate_support_equilibrium(keys, actions_of, q_fn, gap_tol,
                                  tie_tol=1e-9, budget=1000):
    """Deterministic support enumeration for small games.

    Tries support combinations smallest-first; mixing supports are solved by
    rooting their indifference conditions, then every support must lie in
    the optimal action set.  Returns an assignment dict or None when the
    combination count exceeds the budget.
    """
    import itertools

    from scipy import optimize as _opt

    per_key = []
    for key in keys:
        acts = actions_of(key)
        subsets = []
        for r in range(1, len(acts) + 1):
            subsets.extend(itertools.combinations(acts, r))
        per_key.append(subsets)
    total = 1
    for subs in per_key:
        total *= len(subs)
        if total > budget:
            return None

    combos = sorted(itertools.product(*per_key),
                    key=lambda c: (sum(len(s) for s in c), c))
    for combo in combos:
        supports = dict(zip(keys, combo))
        mixing = [(k, list(s)) for k, s in supports.items() if len(s) > 1]
        variables = [(k, a) for k, sup in mixing for a in sup[1:]]

        def assemble(x):
            out = {}
            idx = 0
            for k in keys:
                sup = supports[k]
                acts = actions_of(k)
                if len(sup) == 1:
                    out[k] = {a: (1.0 if a == sup[0] else 0.0) for a in acts}
                    continue
                vals = []
                for _ in sup[1:]:
                    vals.append(float(min(1.0, max(0.0, x[idx]))))
                    idx += 1
                dist = {a: 0.0 for a in acts}
                dist[sup[0]] = max(0.0, 1.0 - sum(vals))
                for a, v in zip(sup[1:], vals):
                    dist[a] = v
                t = sum(dist.values())
                out[k] = {a: v / t for a, v in dist.items()}
            return out

        if variables:
            def equations(x):
                q = q_fn(assemble(x))
                out = []
                for k, sup in mixing:
                    base = q[k][sup[0]]
                    out.extend(q[k][a] - base for a in sup[1:])
                return out

            x0 = [1.0 / len(sup) for k, sup in mixing for _ in sup[1:]]
            sol = _opt.root(equations, x0, method="hybr", tol=1e-12)
            if not all(-1e-9 <= v <= 1.0 + 1e-9 for v in sol.x):
                continue
            if max((abs(v) for v in sol.fun), default=0.0) > 1e-8:
                continue
            assignment = assemble(sol.x)
        else:
            assignment = assemble([])
        q = q_fn(assignment)
        ok = True
        for k in keys:
            best = max(q[k].values())
            for a in supports[k]:
                if q[k][a] < best - gap_tol:
                    ok = False
        if ok:
            return assignment
    return None


def _polish_once(candidate, mixing, oracle):
    variables = [(o, a) for o, sup in mixing for a in sup[1:]]

    def unpack(x):
        prof = candidate.copy()
        idx = 0
        for o, sup in mixing:
            vals = []
            for a in sup[1:]:
                vals.append(float(min(1.0, max(0.0, x[idx]))))
                idx += 1
            dist = {a: 0.0 for a in candidate.dists[o]}
            dist[sup[0]] = max(0.0, 1.0 - sum(vals))
            for a, v in zip(sup[1:], vals):
                dist[a] = v
            total = sum(dist.values())
            prof.dists[o] = {a: v / total for a, v in dist.items()}
        return prof

    owners_mix = [o for o, _ in mixing]

    def equations(x):
        prof = unpack(x)
        q, _, _ = oracle.artifacts(prof, owners_mix, steps=20)
        out = []
        for o, sup in mixing:
            base = q[o][sup[0]]
            out.extend(q[o][a] - base for a in sup[1:])
        return out

    x0 = [candidate.dists[o][a] for o, a in variables]
    sol = optimize.root(equations, x0, method="hybr", tol=1e-12)
    trial = unpack(sol.x)
    in_bounds = all(-1e-9 <= x <= 1.0 + 1e-9 for x in sol.x)
    residual = max((abs(v) for v in sol.fun), default=0.0)
    return trial, bool(in_bounds and residual <= 1e-7)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def epsilon_best_response(tree: GameTree, partition: CoarsePartition,
                          profile: BehaviorProfile, eps: float,
                          frozen: ComputerPlayerSet | None = None,
                          tie_tol: float = 1e-9) -> BehaviorProfile:
    """One element of the floor-constrained cursed best-response map."""
    frozen_dists = frozen.info_set_dists() if frozen else {}
    for iid in tree.player_info_sets():
        acts = tree.info_sets[iid].actions
        if eps > 1.0 / len(acts):
            raise GameError(f"floor {eps} infeasible at {iid!r} with {len(acts)} actions")
        if any(p < eps - 1e-12 for p in profile.dists[iid].values()):
            raise GameError(f"profile violates the floor at {iid!r}")
    free = [o for o in tree.player_info_sets() if o not in frozen_dists]
    q = _q_sce_stage(tree, partition, profile, free, eps, tie_tol)
    out = profile.copy()
    for o in free:
        acts = tree.info_sets[o].actions
        out.dists[o] = _floor_dist(acts, q[o], eps, tie_tol, incumbent=profile.dists[o])
    for iid, d in frozen_dists.items():
        out.dists[iid] = {a: eps + (1.0 - eps * len(d)) * p for a, p in d.items()}
    return out


def solve_sce(tree: GameTree, partition: CoarsePartition,
              config: SolverConfig | None = None,
              frozen: ComputerPlayerSet | None = None) -> EquilibriumResult:
    return _solve(tree, partition, config or SolverConfig(), frozen, "sce")


def solve_chi_sce(tree: GameTree, partition: CoarsePartition, chi: float,
                  config: SolverConfig | None = None,
                  frozen: ComputerPlayerSet | None = None) -> EquilibriumResult:
    if not 0.0 <= chi <= 1.0:
        raise GameError("chi must lie in [0, 1]")
    return _solve(tree, partition, config or SolverConfig(), frozen, "chi-sce", chi)


def solve_causal_sce(tree: GameTree, partition: CoarsePartition,
                     config: SolverConfig | None = None,
                     frozen: ComputerPlayerSet | None = None) -> EquilibriumResult:
    return _solve(tree, partition, config or SolverConfig(), frozen, "causal-sce")


@dataclass(frozen=True)
class WpceReport:
    plausibility: object
    best_response: object

    @property
    def ok(self) -> bool:
        return self.plausibility.ok and self.best_response.ok

    def __str__(self) -> str:
        return f"plausibility: {self.plausibility}\nbest response: {self.best_response}"


def check_wpce(tree: GameTree, partition: CoarsePartition,
               profile: BehaviorProfile, system: dict,
               tol: float = 1e-6) -> WpceReport:
    """Conjunction of cursed-plausibility and local best response."""
    pl = check_cursed_plausible(tree, partition, profile, system, tol)
    br = check_local_best_response(tree, partition, profile, system, tol)
    return WpceReport(pl, br)


def solve_wpce(tree: GameTree, partition: CoarsePartition,
               config: SolverConfig | None = None,
               frozen: ComputerPlayerSet | None = None) -> EquilibriumResult:
    """Solve via the stronger concept and re-certify (every SCE is a WPCE)."""
    res = _solve(tree, partition, config or SolverConfig(), frozen, "sce")
    report = check_wpce(tree, partition, res.profile, res.conjectures, tol=1e-6)
    if not report.ok:
        raise NonConvergenceError(f"solver output failed WPCE recertification:\n{report}")
    res.concept = "wpce"
    res.diagnostics["wpce_recertified"] = True
    return res


def sce_witness_check(tree: GameTree, partition: CoarsePartition,
                      profile: BehaviorProfile, config: SolverConfig | None = None,
                      concept: str = "sce", chi: float = 1.0):
    """Certify a supplied profile: derive the limit conjecture system along
    the default tremble path and test local best responses against it.

    Returns (ok, gaps, conjectures).  This is witness-based certification,
    not a search over all paths.
    """
    config = config or SolverConfig()
    oracle = LimitOracle(tree, partition, concept, chi, config, {})
    owners = sorted(tree.player_info_sets())
    q, conjs, extras = oracle.artifacts(profile, owners)
    gaps = {}
    for o in owners:
        support = [a for a, p in profile.dists[o].items() if p > config.gap_tol]
        best = max(q[o].values())
        gaps[o] = max(best - q[o][a] for a in support) if support else 0.0
    ok = all(g <= 1e-6 for g in gaps.values())
    return ok, gaps, conjs
