"""Bundled games and experiment generators.

The worked examples (trading variants, the club game, the coordination and
matching-pennies examples) plus the three lab-experiment families: pivotal
voting with computer opponents, learning from prices, and the two-stage
common-value auction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .tree import BehaviorProfile, GameBuilder, GameError, GameTree

TRADE_PAYOFFS = {"w1": (3.0, -3.0), "w2": (1.0, -1.0), "w3": (-3.0, 3.0)}


@dataclass(frozen=True)
class ComputerPlayerSet:
    """Players with fixed, commonly known strategies (lab computers)."""

    strategies: dict[str, dict[str, dict[str, float]]]  # player -> info set -> dist

    def players(self) -> set[str]:
        return set(self.strategies)

    def info_set_dists(self) -> dict[str, dict[str, float]]:
        out = {}
        for dists in self.strategies.values():
            out.update(dists)
        return out


def sequential_trading() -> GameTree:
    """Trading game in sequence: player 2 observes player 1's acceptance."""
    b = GameBuilder("sequential trading", ["1", "2"])
    b.chance("r", None, None, {"w1": 1 / 3, "w2": 1 / 3, "w3": 1 / 3})
    for w in ("w1", "w2", "w3"):
        b.player(w, "r", w, "1")
        b.player(w + "a", w, "a", "2")
        b.terminal(w + "d", w, "d", {"1": 0, "2": 0})
        u1, u2 = TRADE_PAYOFFS[w]
        b.terminal(w + "aa", w + "a", "a", {"1": u1, "2": u2})
        b.terminal(w + "ad", w + "a", "d", {"1": 0, "2": 0})
    b.info_set("1:lo", "1", ["w1", "w2"])
    b.info_set("1:hi", "1", ["w3"])
    b.info_set("2:w1", "2", ["w1a"])
    b.info_set("2:hi", "2", ["w2a", "w3a"])
    return b.build()


def simultaneous_trading() -> GameTree:
    """Trading game with simultaneous acceptance decisions."""
    b = GameBuilder("simultaneous trading", ["1", "2"])
    b.chance("r", None, None, {"w1": 1 / 3, "w2": 1 / 3, "w3": 1 / 3})
    for w in ("w1", "w2", "w3"):
        b.player(w, "r", w, "1")
        for a1 in ("a", "d"):
            b.player(w + a1, w, a1, "2")
            for a2 in ("a", "d"):
                trade = a1 == "a" and a2 == "a"
                u1, u2 = TRADE_PAYOFFS[w] if trade else (0.0, 0.0)
                b.terminal(w + a1 + a2, w + a1, a2, {"1": u1, "2": u2})
    b.info_set("1:lo", "1", ["w1", "w2"])
    b.info_set("1:hi", "1", ["w3"])
    b.info_set("2:t2", "2", ["w1a", "w1d"])
    b.info_set("2:t2p", "2", ["w2a", "w2d", "w3a", "w3d"])
    return b.build()


def fictitious_trading() -> GameTree:
    """Simultaneous trading with nature replaced by an indifferent player 0."""
    b = GameBuilder("fictitious-player trading", ["0", "1", "2"])
    b.player("r", None, None, "0")
    for w in ("w1", "w2", "w3"):
        b.player(w, "r", w, "1")
        for a1 in ("a", "d"):
            b.player(w + a1, w, a1, "2")
            for a2 in ("a", "d"):
                trade = a1 == "a" and a2 == "a"
                u1, u2 = TRADE_PAYOFFS[w] if trade else (0.0, 0.0)
                b.terminal(w + a1 + a2, w + a1, a2,
                           {"0": 0.0, "1": u1, "2": u2})
    b.info_set("0:root", "0", ["r"])
    b.info_set("1:lo", "1", ["w1", "w2"])
    b.info_set("1:hi", "1", ["w3"])
    b.info_set("2:t2", "2", ["w1a", "w1d"])
    b.info_set("2:t2p", "2", ["w2a", "w2d", "w3a", "w3d"])
    return b.build()


def running_example() -> GameTree:
    """Three-state game where player 1 can hand the move to player 2."""
    b = GameBuilder("running example", ["1", "2"])
    b.chance("r", None, None, {"w1": 0.4, "w2": 0.2, "w3": 0.4})
    b.player("w1", "r", "w1", "2")
    b.terminal("w1l", "w1", "l", {"1": 0, "2": 1})
    b.terminal("w1r", "w1", "r", {"1": 0, "2": 0})
    for w in ("w2", "w3"):
        b.player(w, "r", w, "1")
        b.terminal(w + "x", w, "x", {"1": 1, "2": 0})
        b.player(w + "y", w, "y", "2")
    b.terminal("w2yl", "w2y", "l", {"1": 0, "2": 1})
    b.terminal("w2yr", "w2y", "r", {"1": 6, "2": 0})
    b.terminal("w3yl", "w3y", "l", {"1": 0, "2": 0})
    b.terminal("w3yr", "w3y", "r", {"1": 0, "2": 1})
    b.info_set("1:I", "1", ["w2", "w3"])
    b.info_set("2:w1", "2", ["w1"])
    b.info_set("2:w2y", "2", ["w2y"])
    b.info_set("2:w3y", "2", ["w3y"])
    return b.build()


def running_profile_y() -> BehaviorProfile:
    """The depicted profile: 1 plays y; 2 plays l, l, r at its three sets."""
    return BehaviorProfile({
        "1:I": {"x": 0.0, "y": 1.0},
        "2:w1": {"l": 1.0, "r": 0.0},
        "2:w2y": {"l": 1.0, "r": 0.0},
        "2:w3y": {"l": 0.0, "r": 1.0},
    })


def running_profile_x() -> BehaviorProfile:
    """Same as the depicted profile except player 1 keeps the move (x)."""
    p = running_profile_y()
    p.dists["1:I"] = {"x": 1.0, "y": 0.0}
    return p


def club_membership() -> GameTree:
    """Club game: join, get vetted, then confirm membership or resign."""
    b = GameBuilder("club membership", ["G", "C"])
    b.chance("r", None, None, {"w1": 1 / 3, "w2": 2 / 3})
    pay = {"w1": {"resign": (-1, 1), "confirm": (-2, 2)},
           "w2": {"resign": (-1, -1), "confirm": (2, -2)}}
    for w in ("w1", "w2"):
        b.player(w, "r", w, "G")
        b.terminal(w + "d", w, "d", {"G": 0, "C": 0})
        b.player(w + "a", w, "a", "C")
        b.terminal(w + "ad", w + "a", "d", {"G": 0, "C": 0})
        b.player(w + "aa", w + "a", "a", "G")
        for act in ("resign", "confirm"):
            g, c = pay[w][act]
            b.terminal(w + "aa" + act[0], w + "aa", act, {"G": g, "C": c})
    b.info_set("G:1", "G", ["w1", "w2"])
    b.info_set("C:w1", "C", ["w1a"])
    b.info_set("C:w2", "C", ["w2a"])
    b.info_set("G:2", "G", ["w1aa", "w2aa"])
    return b.build()


def mixing_example() -> GameTree:
    """Three-player game whose construction supports mixing by player 1."""
    b = GameBuilder("endogenous-information mixing", ["1", "2", "3"])
    pay = {
        ("L", "l", "a"): (1, 1, 1), ("L", "l", "b"): (1, 1, 0),
        ("L", "r", "a"): (1, 0, 1), ("L", "r", "b"): (1, 0, 3),
        ("R", "l", "a"): (0, 0, 1), ("R", "l", "b"): (2, 0, 3),
        ("R", "r", "a"): (0, 1, 1), ("R", "r", "b"): (2, 1, 0),
    }
    b.player("root", None, None, "1")
    for m1 in ("L", "R"):
        b.player(m1, "root", m1, "2")
        for m2 in ("l", "r"):
            b.player(m1 + m2, m1, m2, "3")
            for m3 in ("a", "b"):
                u = pay[(m1, m2, m3)]
                b.terminal(m1 + m2 + m3, m1 + m2, m3,
                           {"1": u[0], "2": u[1], "3": u[2]})
    b.info_set("I1", "1", ["root"])
    b.info_set("I2L", "2", ["L"])
    b.info_set("I2R", "2", ["R"])
    b.info_set("I3", "3", ["Ll", "Lr", "Rl", "Rr"])
    return b.build()


def pennies_threeplayer() -> GameTree:
    """Matching pennies plus an onlooker told 'either 1 played T or 2 played t'.

    Every coarse set equals an information set, yet the onlooker's cursed
    conjecture misses the correlation between the two pennies players.
    """
    b = GameBuilder("pennies with onlooker", ["1", "2", "3"])
    b.player("root", None, None, "1")
    b.player("H", "root", "H", "2")
    b.player("T", "root", "T", "2")
    b.terminal("Hh", "H", "h", {"1": 1, "2": 0, "3": 0})
    pay3 = {"Ht": (7.0, 0.0), "Th": (7.0, 0.0), "Tt": (0.0, 12.0)}
    base = {"Ht": (0, 1), "Th": (0, 1), "Tt": (1, 0)}
    for node, parent, act in (("Ht", "H", "t"), ("Th", "T", "h"), ("Tt", "T", "t")):
        b.player(node, parent, act, "3")
        u1, u2 = base[node]
        ua, ub = pay3[node]
        b.terminal(node + "a", node, "a", {"1": u1, "2": u2, "3": ua})
        b.terminal(node + "b", node, "b", {"1": u1, "2": u2, "3": ub})
    b.info_set("I1", "1", ["root"])
    b.info_set("I2", "2", ["H", "T"])
    b.info_set("I3", "3", ["Ht", "Th", "Tt"])
    return b.build()


def pennies_profile_b() -> BehaviorProfile:
    """Both pennies players mix evenly; the onlooker picks b."""
    return BehaviorProfile({
        "I1": {"H": 0.5, "T": 0.5},
        "I2": {"h": 0.5, "t": 0.5},
        "I3": {"a": 0.0, "b": 1.0},
    })


def causal_demo() -> GameTree:
    """Two-move game where the follower merely reacts to the leader."""
    b = GameBuilder("leader and reactive follower", ["1", "2"])
    pay = {("L", "l"): (1, 1), ("L", "r"): (0, 0),
           ("R", "l"): (0, 0), ("R", "r"): (3, 3)}
    b.player("root", None, None, "1")
    for m1 in ("L", "R"):
        b.player(m1, "root", m1, "2")
        for m2 in ("l", "r"):
            u1, u2 = pay[(m1, m2)]
            b.terminal(m1 + m2, m1, m2, {"1": u1, "2": u2})
    b.info_set("I1", "1", ["root"])
    b.info_set("I2L", "2", ["L"])
    b.info_set("I2R", "2", ["R"])
    return b.build()


BUNDLED_DOCUMENTS = {
    "sequential-trading": "sequential-trading.game",
    "running-example": "running-example.game",
    "club-membership": "club-membership.game",
    "mixing": "mixing.game",
    "pennies-onlooker": "pennies-onlooker.game",
    "leader-follower": "leader-follower.game",
    "trading-simultaneous": "trading-simultaneous.game",
    "trading-fictitious": "trading-fictitious.game",
}


def bundled_game_text(name: str) -> str:
    """Canonical document text of a bundled game, by short name."""
    from importlib import resources
    fname = BUNDLED_DOCUMENTS.get(name)
    if fname is None:
        raise GameError(f"no bundled game named {name!r}")
    return resources.files("cursedeq.data").joinpath(fname).read_text("utf-8")


EXAMPLE_GAMES = {
    "sequential-trading": sequential_trading,
    "running-example": running_example,
    "club-membership": club_membership,
    "mixing": mixing_example,
    "pennies-onlooker": pennies_threeplayer,
    "leader-follower": causal_demo,
    "trading-simultaneous": simultaneous_trading,
    "trading-fictitious": fictitious_trading,
}


# ---------------------------------------------------------------------------
# Pivotal voting
# ---------------------------------------------------------------------------

def voting_game(p: float, q: float, treatment: str):
    """Three-voter jar game: a subject and two computers voting on the color.

    Computers see the ball: red means vote red, blue means vote blue with
    probability q.  The subject sees nothing (simultaneous) or both computer
    votes (sequential).  Majority-correct pays the subject 2.
    """
    if not 0.0 < p < 1.0 or not 0.0 < q < 1.0:
        raise GameError("voting parameters must lie strictly inside (0, 1)")
    if treatment not in ("simultaneous", "sequential"):
        raise GameError(f"unknown treatment {treatment!r}")
    b = GameBuilder(f"pivotal voting {treatment} p={p} q={q}",
                    ["subj", "c1", "c2"])
    b.chance("ball", None, None, {"red": p, "blue": 1.0 - p})
    comp_dist = {"red": {"r": 1.0, "b": 0.0},
                 "blue": {"r": 1.0 - q, "b": q}}
    subj_sets = {}
    for color in ("red", "blue"):
        b.player(color, "ball", color, "c1")
        for v1 in ("r", "b"):
            n1 = color + v1
            b.player(n1, color, v1, "c2")
            for v2 in ("r", "b"):
                n2 = n1 + v2
                b.player(n2, n1, v2, "subj")
                for vs in ("r", "b"):
                    votes = [v1, v2, vs]
                    majority = "r" if votes.count("r") >= 2 else "b"
                    win = (majority == "r") == (color == "red")
                    b.terminal(n2 + vs, n2, vs,
                               {"subj": 2.0 if win else 0.0, "c1": 0.0, "c2": 0.0})
                key = (v1, v2) if treatment == "sequential" else "all"
                subj_sets.setdefault(key, []).append(n2)
    b.info_set("c1:red", "c1", ["red"])
    b.info_set("c1:blue", "c1", ["blue"])
    b.info_set("c2:red", "c2", ["redr", "redb"])
    b.info_set("c2:blue", "c2", ["bluer", "blueb"])
    frozen_dists = {"c1": {"c1:red": comp_dist["red"], "c1:blue": comp_dist["blue"]},
                    "c2": {"c2:red": comp_dist["red"], "c2:blue": comp_dist["blue"]}}
    if treatment == "simultaneous":
        b.info_set("subj:all", "subj", subj_sets["all"])
    else:
        for (v1, v2), nodes in sorted(subj_sets.items()):
            b.info_set(f"subj:{v1}{v2}", "subj", nodes)
    return b.build(), ComputerPlayerSet(frozen_dists)


# ---------------------------------------------------------------------------
# Learning from prices
# ---------------------------------------------------------------------------

def type_grid(g: int) -> list[float]:
    """Uniform grid of g type values on cell midpoints of (0, 1).

    Midpoints keep the discretized signal densities strictly positive at
    both ends, as nature requires.
    """
    return [(k + 0.5) / g for k in range(g)]


def price_grid(g: int) -> list[float]:
    return [k / (g - 1) for k in range(g)]


def snap_price(p: float, g: int) -> float:
    """Nearest price-grid point, halves rounding up."""
    step = 1.0 / (g - 1)
    idx = int(p / step + 0.5)
    return min(max(idx, 0), g - 1) * step


def type_weights(g: int, high: bool) -> dict[float, float]:
    """Discretized signal distribution given the asset value."""
    grid = type_grid(g)
    dens = [2 * t if high else 2 * (1 - t) for t in grid]
    total = sum(dens)
    return {t: d / total for t, d in zip(grid, dens)}


def prices_game(g: int, treatment: str, p1: float):
    """One price cell of the trading experiment: the public price p1 is a
    parameter, everything else (value, both types) is drawn by nature.

    The full experiment is the family of these games over the price grid;
    p1 is independent of the rest, so the cells separate exactly.
    """
    if treatment not in ("simultaneous", "sequential"):
        raise GameError(f"unknown treatment {treatment!r}")
    grid = type_grid(g)
    p2 = {"buy": snap_price((1 + p1) / 2, g), "sell": snap_price(p1 / 2, g)}
    b = GameBuilder(f"learning-from-prices {treatment} p1={p1:.4f}", ["T1", "T2"])
    b.chance("V", None, None, {"hi": 0.5, "lo": 0.5})
    t1_sets = {k: [] for k in range(g)}
    t2_sets = {}
    for v in ("hi", "lo"):
        wts = type_weights(g, v == "hi")
        b.chance("t1." + v, "V", v, {f"{i}": wts[t] for i, t in enumerate(grid)})
        for i, t1 in enumerate(grid):
            n1 = f"{v}.{i}"
            b.chance(n1, "t1." + v, f"{i}", {f"{j}": wts2 for j, wts2
                                             in enumerate(type_weights(g, v == "hi").values())})
    # second type layer shares the same conditional distribution
    for v in ("hi", "lo"):
        for i in range(g):
            n1 = f"{v}.{i}"
            for j, t2 in enumerate(grid):
                node = f"{n1}.{j}"
                b.player(node, n1, f"{j}", "T1")
                t1_sets[i].append(node)
                value = 1.0 if v == "hi" else 0.0
                for a1 in ("buy", "sell"):
                    u1 = (value - p1) if a1 == "buy" else (p1 - value)
                    n2 = f"{node}.{a1}"
                    b.player(n2, node, a1, "T2")
                    price = p2[a1]
                    if treatment == "sequential":
                        key = (j, a1)
                        for a2 in ("buy", "sell"):
                            u2 = (value - price) if a2 == "buy" else (price - value)
                            b.terminal(f"{n2}.{a2}", n2, a2,
                                       {"T1": u1, "T2": u2})
                    else:
                        key = j
                        for bi, lim in enumerate(grid_orders(g)):
                            buys = price <= lim + 1e-12
                            u2 = (value - price) if buys else (price - value)
                            b.terminal(f"{n2}.o{bi}", n2, f"o{bi}",
                                       {"T1": u1, "T2": u2})
                    t2_sets.setdefault(key, []).append(n2)
    for i in range(g):
        b.info_set(f"T1:{i}", "T1", t1_sets[i])
    for key in sorted(t2_sets):
        name = f"T2:{key}" if treatment == "simultaneous" else f"T2:{key[0]}:{key[1]}"
        b.info_set(name, "T2", t2_sets[key])
    return b.build()


def grid_orders(g: int) -> list[float]:
    """Limit-order levels available to trader 2 (the price grid)."""
    return price_grid(g)


# ---------------------------------------------------------------------------
# Two-stage common-value auction
# ---------------------------------------------------------------------------

DEFAULT_TYPES = tuple(range(0, 11)) + tuple(range(50, 61))


@dataclass(frozen=True)
class TwoStageAuctionSpec:
    types: tuple[int, ...] = DEFAULT_TYPES
    bid_lo: int = 0
    bid_hi: int = 120

    @property
    def bids(self) -> range:
        return range(self.bid_lo, self.bid_hi + 1)


def two_stage_auction_tree(spec: TwoStageAuctionSpec,
                           terminal_limit: int = 2_000_000) -> GameTree:
    """Explicit extensive form of the two-stage auction.

    Only feasible for reduced parameter sets; the full design exceeds any
    explicit tree, so the golden harness evaluates it analytically.
    """
    types = spec.types
    bids = list(spec.bids)
    n_term = (len(types) ** 2) * len(bids) ** 3
    if n_term > terminal_limit:
        raise GameError(
            f"two-stage auction tree would have {n_term} terminals; "
            "reduce the type set or bid range, or use the prediction harness")

    def stage_payoff(t1, t2, b1, b2):
        if t1 == t2:
            return 0.0, 0.0
        v = float(t1 + t2)
        if b1 > b2 or (b1 == b2 and t1 > t2):
            return v - min(b1, b2), 0.0
        return 0.0, v - min(b1, b2)

    b = GameBuilder("two-stage auction", ["1", "2"])
    prior = 1.0 / (len(types) ** 2)
    b.chance("r", None, None,
             {f"{t1},{t2}": prior for t1 in types for t2 in types})
    sets1, sets2, sets_rev = {}, {}, {}
    for t1 in types:
        for t2 in types:
            n0 = f"{t1},{t2}"
            b.player(n0, "r", n0, "1")
            sets1.setdefault(t1, []).append(n0)
            for b1 in bids:
                n1 = f"{n0}|{b1}"
                b.player(n1, n0, f"{b1}", "2")
                sets2.setdefault(t2, []).append(n1)
                for b2 in bids:
                    n2 = f"{n1},{b2}"
                    b.player(n2, n1, f"{b2}", "1")
                    side = "le" if b1 <= b2 else "gt"
                    sets_rev.setdefault((t1, b1, side), []).append(n2)
                    u1s, u2s = stage_payoff(t1, t2, b1, b2)
                    for br in bids:
                        u1r, _ = stage_payoff(t1, t2, br, b2)
                        b.terminal(f"{n2}|{br}", n2, f"{br}",
                                   {"1": u1s + u1r, "2": u2s})
    for t1, nodes in sorted(sets1.items()):
        b.info_set(f"1:t{t1}", "1", nodes)
    for t2, nodes in sorted(sets2.items()):
        b.info_set(f"2:t{t2}", "2", nodes)
    for (t1, b1, side), nodes in sorted(sets_rev.items()):
        b.info_set(f"1:t{t1}:b{b1}:{side}", "1", nodes)
    return b.build()


# ---------------------------------------------------------------------------
# Experiment specifications
# ---------------------------------------------------------------------------

VOTING_P = tuple(round(0.1 * k, 1) for k in range(1, 10))
VOTING_Q = (0.1, 0.25, 0.5, 0.75, 0.9)


@dataclass
class ExperimentSpec:
    """Parsed description of one experiment run."""

    kind: str  # voting | learning-from-prices | two-stage-auction | trading | fictitious-player-trading
    concept: str = "sce"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        known = {"voting", "learning-from-prices", "two-stage-auction",
                 "trading", "fictitious-player-trading"}
        if self.kind not in known:
            raise GameError(f"unknown experiment {self.kind!r}")


def generate_experiment(spec: ExperimentSpec):
    """Build the extensive game (plus frozen computer players, if any).

    Experiment families with many cells (voting without fixed p and q,
    prices) are generated per cell; pass the cell parameters in ``params``.
    """
    p = spec.params
    if spec.kind == "voting":
        return voting_game(float(p.get("p", 0.6)), float(p.get("q", 0.5)),
                           p.get("treatment", "sequential"))
    if spec.kind == "learning-from-prices":
        g = int(p.get("G", 21))
        p1 = float(p.get("p1", 0.5))
        return prices_game(g, p.get("treatment", "simultaneous"), p1), None
    if spec.kind == "two-stage-auction":
        types = tuple(int(t) for t in p.get("types", DEFAULT_TYPES))
        aspec = TwoStageAuctionSpec(types, int(p.get("bid_lo", 0)),
                                    int(p.get("bid_hi", 120)))
        return two_stage_auction_tree(aspec), None
    if spec.kind == "trading":
        if p.get("treatment", "simultaneous") == "sequential":
            return sequential_trading(), None
        return simultaneous_trading(), None
    if spec.kind == "fictitious-player-trading":
        return fictitious_trading(), None
    raise GameError(f"unknown experiment {spec.kind!r}")
