"""Simultaneous Bayesian games: cursed and independently cursed equilibria.

Nature draws a state once, each player observes a cell of their type
partition, and everyone moves once.  Cursed players best-respond to the
joint distribution of opponent action profiles conditional on their type,
treated as independent of the state; independently cursed players also
treat opponents' actions as independent of each other.  The two coincide
for two players, and both coincide with the sequential concepts on this
class, which the crosscheck verifies numerically on the tree embedding.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from scipy import optimize

from .bestresponse import _floor_dist
from .partition import coarsest_valid_partition
from .solvers import NonConvergenceError, SolverConfig, solve_sce
from .tree import GameBuilder, GameError, GameTree


@dataclass
class BayesianGame:
    """Normal-form description: states, priors, type partitions, payoffs.

    ``payoffs`` maps (state, action profile in player order) to one utility
    per player, also in player order.
    """

    title: str
    states: tuple[str, ...]
    prior: dict[str, float]
    players: tuple[str, ...]
    types: dict[str, tuple[tuple[str, ...], ...]]
    actions: dict[str, tuple[str, ...]]
    payoffs: dict[tuple, tuple[float, ...]]

    def __post_init__(self):
        total = sum(self.prior.values())
        if abs(total - 1.0) > 1e-9 or any(p <= 0 for p in self.prior.values()):
            raise GameError("prior must be fully mixed and sum to 1")
        for pl, cells in self.types.items():
            seen = [s for cell in cells for s in cell]
            if sorted(seen) != sorted(self.states):
                raise GameError(f"type cells of {pl!r} do not partition the states")

    def type_of(self, player: str, state: str) -> int:
        for k, cell in enumerate(self.types[player]):
            if state in cell:
                return k
        raise GameError(f"state {state!r} not in any type of {player!r}")

    def payoff(self, state, profile, player):
        return self.payoffs[(state, profile)][self.players.index(player)]


TypeStrategy = dict  # (player, type index) -> action distribution


def uniform_type_strategy(game: BayesianGame) -> TypeStrategy:
    out = {}
    for pl in game.players:
        for k in range(len(game.types[pl])):
            acts = game.actions[pl]
            out[(pl, k)] = {a: 1.0 / len(acts) for a in acts}
    return out


def _opponent_beliefs(game: BayesianGame, sigma: TypeStrategy, player: str,
                      tix: int, independent: bool) -> dict[tuple, float]:
    """Distribution over opponent action profiles conditional on own type,
    treated as independent of the state.  ``independent`` additionally
    factors it into per-opponent marginals."""
    cell = game.types[player][tix]
    weight = {w: game.prior[w] for w in cell}
    total = sum(weight.values())
    others = [m for m in game.players if m != player]
    if independent:
        marg = {}
        for m in others:
            marg[m] = {a: sum(weight[w] * sigma[(m, game.type_of(m, w))][a]
                              for w in cell) / total
                       for a in game.actions[m]}
        out = {}
        for combo in itertools.product(*(game.actions[m] for m in others)):
            p = 1.0
            for m, a in zip(others, combo):
                p *= marg[m][a]
            out[combo] = p
        return out
    out = {}
    for combo in itertools.product(*(game.actions[m] for m in others)):
        p = 0.0
        for w in cell:
            q = weight[w]
            for m, a in zip(others, combo):
                q *= sigma[(m, game.type_of(m, w))][a]
            p += q
        out[combo] = p / total
    return out


def type_action_values(game: BayesianGame, sigma: TypeStrategy, player: str,
                       tix: int, independent: bool) -> dict[str, float]:
    """Expected utility of each own action under the cursed belief,
    conditional on the type (normalizing does not change the argmax)."""
    cell = game.types[player][tix]
    total = sum(game.prior[w] for w in cell)
    beliefs = _opponent_beliefs(game, sigma, player, tix, independent)
    others = [m for m in game.players if m != player]
    pidx = game.players.index(player)
    out = {}
    for a in game.actions[player]:
        v = 0.0
        for w in cell:
            pw = game.prior[w] / total
            for combo, bp in beliefs.items():
                if bp == 0.0:
                    continue
                full = dict(zip(others, combo))
                full[player] = a
                profile = tuple(full[m] for m in game.players)
                v += pw * bp * game.payoffs[(w, profile)][pidx]
        out[a] = v
    return out


def _solve_static(game: BayesianGame, config: SolverConfig, independent: bool,
                  frozen: dict | None, concept: str):
    """Floor homotopy with damped iteration and support polish, mirroring
    the tree solver step for step so the embedded comparisons line up."""
    frozen = frozen or {}
    cells = sorted((pl, k) for pl in game.players
                   for k in range(len(game.types[pl])))
    free = [c for c in cells if c not in frozen]
    rng = random.Random(config.seed)

    def q_all(sigma):
        return {c: type_action_values(game, sigma, c[0], c[1], independent)
                for c in free}

    def floored(sigma, eps):
        out = {}
        for c in cells:
            base = frozen.get(c, sigma[c])
            k = len(base)
            out[c] = {a: eps + (1.0 - eps * k) * p for a, p in base.items()}
        return out

    best_gap, best_gaps = float("inf"), {}
    max_actions = max(len(game.actions[pl]) for pl in game.players)
    iterations = 0
    for attempt in range(config.restarts + 1):
        if attempt == 0:
            sigma = uniform_type_strategy(game)
            sigma.update({c: dict(d) for c, d in frozen.items()})
        else:
            sigma = {}
            for c in cells:
                if c in frozen:
                    sigma[c] = dict(frozen[c])
                    continue
                acts = game.actions[c[0]]
                raw = [rng.random() + 1e-3 for _ in acts]
                s = sum(raw)
                sigma[c] = {a: w / s for a, w in zip(acts, raw)}

        for eps in config.schedule(max_actions):
            sigma = floored(sigma, eps)
            avg = {c: dict(d) for c, d in sigma.items()}
            count = 1
            converged = False
            for _ in range(config.max_iters):
                iterations += 1
                q = q_all(sigma)
                target = {c: dict(d) for c, d in sigma.items()}
                for c in free:
                    target[c] = _floor_dist(game.actions[c[0]], q[c], eps,
                                            config.tie_tol, incumbent=sigma[c])
                resid = max(abs(target[c][a] - sigma[c][a])
                            for c in cells for a in sigma[c])
                sigma = {c: {a: (1 - config.damping) * sigma[c][a]
                             + config.damping * target[c][a]
                             for a in sigma[c]} for c in cells}
                count += 1
                for c in cells:
                    for a in sigma[c]:
                        avg[c][a] += (sigma[c][a] - avg[c][a]) / count
                if resid <= max(config.fp_tol, eps * 1e-3):
                    converged = True
                    break
            if not converged:
                sigma = {c: dict(d) for c, d in avg.items()}

        candidate = {}
        for c in cells:
            if c in frozen:
                candidate[c] = dict(frozen[c])
                continue
            kept = {a: p for a, p in sigma[c].items() if p > 5.0 * config.eps_floor}
            total = sum(kept.values())
            candidate[c] = {a: kept.get(a, 0.0) / total for a in sigma[c]}

        candidate = _polish_static(game, candidate, free, independent, config)
        q = {c: type_action_values(game, candidate, c[0], c[1], independent)
             for c in free}
        gaps, ok = {}, True
        for c in free:
            support = [a for a, p in candidate[c].items() if p > 0.0]
            best = max(q[c].values())
            gaps[c] = max(best - q[c][a] for a in support)
            if gaps[c] > config.gap_tol:
                ok = False
        if ok:
            return candidate, gaps, iterations
        worst = max(gaps.values(), default=0.0)
        if worst < best_gap:
            best_gap, best_gaps = worst, gaps

    from .solvers import enumerate_support_equilibrium

    if not config.polish:
        raise NonConvergenceError(
            f"{concept} solve failed after {config.restarts + 1} starts "
            f"(best gap {best_gap:.3g})", best_gap, best_gaps)

    def q_fn(assignment):
        sigma = {c: dict(d) for c, d in assignment.items()}
        sigma.update({c: dict(d) for c, d in frozen.items()})
        return {c: type_action_values(game, sigma, c[0], c[1], independent)
                for c in free}

    found = enumerate_support_equilibrium(
        free, lambda c: game.actions[c[0]], q_fn, config.gap_tol)
    if found is not None:
        sigma = {c: dict(d) for c, d in found.items()}
        sigma.update({c: dict(d) for c, d in frozen.items()})
        q = {c: type_action_values(game, sigma, c[0], c[1], independent)
             for c in free}
        gaps = {c: max(max(q[c].values()) - q[c][a]
                       for a, p in sigma[c].items() if p > 0.0) for c in free}
        if all(g <= config.gap_tol for g in gaps.values()):
            return sigma, gaps, iterations

    raise NonConvergenceError(
        f"{concept} solve failed after {config.restarts + 1} starts "
        f"(best gap {best_gap:.3g})", best_gap, best_gaps)


def _polish_static(game, candidate, free, independent, config):
    if not config.polish:
        return candidate
    q0 = {c: type_action_values(game, candidate, c[0], c[1], independent)
          for c in free}
    for prune in (None, 1e-3, 1e-6):
        mixing = []
        for c in free:
            support = [a for a, p in candidate[c].items() if p > 0.0]
            if prune is not None:
                best = max(q0[c].values())
                kept = [a for a in support if q0[c][a] >= best - prune]
                support = kept or support
            if len(support) > 1:
                mixing.append((c, support))
        if not mixing:
            return candidate
        trial, ok = _polish_static_once(game, candidate, mixing, independent)
        if ok:
            return trial
    return candidate


def _polish_static_once(game, candidate, mixing, independent):
    variables = [(c, a) for c, sup in mixing for a in sup[1:]]

    def unpack(x):
        sigma = {c: dict(d) for c, d in candidate.items()}
        idx = 0
        for c, sup in mixing:
            vals = []
            for a in sup[1:]:
                vals.append(float(min(1.0, max(0.0, x[idx]))))
                idx += 1
            dist = {a: 0.0 for a in candidate[c]}
            dist[sup[0]] = max(0.0, 1.0 - sum(vals))
            for a, v in zip(sup[1:], vals):
                dist[a] = v
            total = sum(dist.values())
            sigma[c] = {a: v / total for a, v in dist.items()}
        return sigma

    def equations(x):
        sigma = unpack(x)
        out = []
        for c, sup in mixing:
            q = type_action_values(game, sigma, c[0], c[1], independent)
            out.extend(q[a] - q[sup[0]] for a in sup[1:])
        return out

    x0 = [candidate[c][a] for c, a in variables]
    sol = optimize.root(equations, x0, method="hybr", tol=1e-12)
    trial = unpack(sol.x)
    in_bounds = all(-1e-9 <= x <= 1.0 + 1e-9 for x in sol.x)
    residual = max((abs(v) for v in sol.fun), default=0.0)
    return trial, bool(in_bounds and residual <= 1e-7)


def solve_ice(game: BayesianGame, config: SolverConfig | None = None,
              frozen: dict | None = None) -> TypeStrategy:
    """Fixed point of type-wise best response against per-opponent marginal
    beliefs treated as mutually independent and independent of the state."""
    sigma, _, _ = _solve_static(game, config or SolverConfig(), True, frozen, "ice")
    return sigma


def solve_ce(game: BayesianGame, config: SolverConfig | None = None,
             frozen: dict | None = None) -> TypeStrategy:
    """Fixed point against the joint opponent action-profile distribution
    conditional on own type, treated as independent of the state."""
    sigma, _, _ = _solve_static(game, config or SolverConfig(), False, frozen, "ce")
    return sigma


# ---------------------------------------------------------------------------
# Extensive embedding and the equivalence crosscheck
# ---------------------------------------------------------------------------

def embed_bayesian(game: BayesianGame) -> GameTree:
    """Extensive form: nature draws the state, players move in order, each
    seeing only their own type (histories pooled over earlier moves)."""
    b = GameBuilder(game.title, list(game.players))
    b.chance("r", None, None, dict(game.prior))
    sets = {}
    prev_nodes = {w: f"s:{w}" for w in game.states}
    for w in game.states:
        first = game.players[0]
        node = prev_nodes[w]
        b.player(node, "r", w, first)
        sets.setdefault((first, game.type_of(first, w)), []).append(node)

    def extend(idx, node, w, history):
        player = game.players[idx]
        for a in game.actions[player]:
            child = f"{node}.{a}"
            if idx + 1 < len(game.players):
                nxt = game.players[idx + 1]
                b.player(child, node, a, nxt)
                sets.setdefault((nxt, game.type_of(nxt, w)), []).append(child)
                extend(idx + 1, child, w, history + (a,))
            else:
                profile = history + (a,)
                us = game.payoffs[(w, profile)]
                b.terminal(child, node, a,
                           {pl: u for pl, u in zip(game.players, us)})

    for w in game.states:
        extend(0, prev_nodes[w], w, ())
    for (pl, k), nodes in sorted(sets.items()):
        b.info_set(f"{pl}:T{k}", pl, nodes)
    return b.build()


def strategy_to_profile(game: BayesianGame, sigma: TypeStrategy):
    from .tree import BehaviorProfile
    return BehaviorProfile({f"{pl}:T{k}": dict(sigma[(pl, k)])
                            for pl in game.players
                            for k in range(len(game.types[pl]))})


def profile_to_strategy(game: BayesianGame, profile) -> TypeStrategy:
    return {(pl, k): dict(profile.dists[f"{pl}:T{k}"])
            for pl in game.players for k in range(len(game.types[pl]))}


@dataclass(frozen=True)
class CrosscheckReport:
    max_profile_gap: float
    ice_passes_sce: bool
    sce_passes_ice: bool
    detail: dict

    @property
    def ok(self) -> bool:
        return self.max_profile_gap <= 1e-6 and self.ice_passes_sce and self.sce_passes_ice


def crosscheck_equivalence(game: BayesianGame, config: SolverConfig | None = None,
                           tol: float = 1e-6) -> CrosscheckReport:
    """Solve the embedding sequentially and the normal form independently,
    then verify the profiles coincide and each passes the other's check."""
    config = config or SolverConfig()
    tree = embed_bayesian(game)
    partition = coarsest_valid_partition(tree)
    sce = solve_sce(tree, partition, config)
    ice = solve_ice(game, config)

    gap = 0.0
    for pl in game.players:
        for k in range(len(game.types[pl])):
            tdist = sce.profile.dists[f"{pl}:T{k}"]
            for a, p in ice[(pl, k)].items():
                gap = max(gap, abs(p - tdist[a]))

    # each side certified by the other's optimality conditions
    ice_ok = True
    for pl in game.players:
        for k in range(len(game.types[pl])):
            q = type_action_values(game, ice, pl, k, True)
            best = max(q.values())
            for a, p in ice[(pl, k)].items():
                if p > tol and q[a] < best - tol:
                    ice_ok = False
    from .solvers import sce_witness_check
    sce_of_ice_ok, _, _ = sce_witness_check(tree, partition,
                                            strategy_to_profile(game, ice), config)
    sigma_sce = profile_to_strategy(game, sce.profile)
    sce_as_ice_ok = True
    for pl in game.players:
        for k in range(len(game.types[pl])):
            q = type_action_values(game, sigma_sce, pl, k, True)
            best = max(q.values())
            for a, p in sigma_sce[(pl, k)].items():
                if p > tol and q[a] < best - tol:
                    sce_as_ice_ok = False
    return CrosscheckReport(gap, sce_of_ice_ok and ice_ok, sce_as_ice_ok,
                            {"sce_gaps": sce.gaps})


# ---------------------------------------------------------------------------
# Stock normal forms
# ---------------------------------------------------------------------------

def trading_bayesian() -> BayesianGame:
    """The two-player trading table: trade iff both accept."""
    states = ("w1", "w2", "w3")
    pay = {"w1": (3.0, -3.0), "w2": (1.0, -1.0), "w3": (-3.0, 3.0)}
    payoffs = {}
    for w in states:
        for a1 in ("a", "d"):
            for a2 in ("a", "d"):
                trade = a1 == "a" and a2 == "a"
                payoffs[(w, (a1, a2))] = pay[w] if trade else (0.0, 0.0)
    return BayesianGame(
        "trading table", states, {w: 1 / 3 for w in states}, ("1", "2"),
        {"1": (("w1", "w2"), ("w3",)), "2": (("w1",), ("w2", "w3"))},
        {"1": ("a", "d"), "2": ("a", "d")}, payoffs)


def voting_bayesian(p: float, q: float, treatment: str) -> BayesianGame:
    """Voting experiment reduced to its Bayesian normal form.

    In the sequential treatment the subject's actions are complete plans
    mapping the observed computer-vote pair to a vote, which is how the
    static cursed concepts apply to that treatment.
    """
    states = ("red", "blue")
    players = ("subj", "c1", "c2")
    if treatment == "simultaneous":
        subj_actions = ("r", "b")

        def subj_vote(action, v1, v2):
            return action
    elif treatment == "sequential":
        pairs = [("r", "r"), ("r", "b"), ("b", "r"), ("b", "b")]
        subj_actions = tuple("".join(plan) for plan in
                             itertools.product("rb", repeat=4))

        def subj_vote(action, v1, v2):
            return action[pairs.index((v1, v2))]
    else:
        raise GameError(f"unknown treatment {treatment!r}")

    payoffs = {}
    for w in states:
        for a_s in subj_actions:
            for v1 in ("r", "b"):
                for v2 in ("r", "b"):
                    vote = subj_vote(a_s, v1, v2)
                    votes = [vote, v1, v2]
                    majority = "r" if votes.count("r") >= 2 else "b"
                    win = (majority == "r") == (w == "red")
                    payoffs[(w, (a_s, v1, v2))] = (2.0 if win else 0.0, 0.0, 0.0)
    return BayesianGame(
        f"voting normal form {treatment}", states, {"red": p, "blue": 1 - p},
        players,
        {"subj": (("red", "blue"),), "c1": (("red",), ("blue",)),
         "c2": (("red",), ("blue",))},
        {"subj": subj_actions, "c1": ("r", "b"), "c2": ("r", "b")}, payoffs)


def voting_computer_freeze(game: BayesianGame, q: float) -> dict:
    """Frozen computer strategies for the voting normal form."""
    frozen = {}
    for c in ("c1", "c2"):
        for k, cell in enumerate(game.types[c]):
            if cell == ("red",):
                frozen[(c, k)] = {"r": 1.0, "b": 0.0}
            else:
                frozen[(c, k)] = {"r": 1.0 - q, "b": q}
    return frozen


def random_bayesian_game(rng: random.Random, n_states: int = 3,
                         n_actions: int = 2, n_players: int = 2) -> BayesianGame:
    """Seeded game with random type partitions and payoffs."""
    states = tuple(f"w{i}" for i in range(n_states))
    raw = [rng.random() + 0.2 for _ in states]
    total = sum(raw)
    prior = {w: x / total for w, x in zip(states, raw)}

    def rand_partition():
        k = rng.randint(1, n_states)
        cells = [[] for _ in range(k)]
        for i, w in enumerate(states):
            cells[i % k].append(w)
        rng.shuffle(cells)
        return tuple(tuple(c) for c in cells if c)

    players = tuple(str(i + 1) for i in range(n_players))
    actions = tuple(chr(ord("a") + i) for i in range(n_actions))
    payoffs = {}
    for w in states:
        for combo in itertools.product(actions, repeat=n_players):
            payoffs[(w, combo)] = tuple(round(rng.uniform(-3, 3), 3)
                                        for _ in players)
    return BayesianGame("random bayesian", states, prior, players,
                        {pl: rand_partition() for pl in players},
                        {pl: actions for pl in players}, payoffs)
