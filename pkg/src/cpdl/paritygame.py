"""Finite parity games and a positional solver.

Convention used throughout the package: an infinite play is won by
``EXISTS`` iff the largest priority seen infinitely often is even.  A player
who must move from a position without successors loses.
"""

from collections import deque
from dataclasses import dataclass, field

EXISTS = 0
FORALL = 1

__all__ = ['EXISTS', 'FORALL', 'ParityGame', 'Solution', 'solve',
           'validate_strategy', 'to_dot']


@dataclass
class ParityGame:
    """Game graph over positions ``0..n-1``."""

    owner: list = field(default_factory=list)
    moves: list = field(default_factory=list)
    priority: list = field(default_factory=list)
    labels: list = field(default_factory=list)

    def add(self, owner, priority, label=None):
        self.owner.append(owner)
        self.priority.append(priority)
        self.moves.append([])
        self.labels.append(label)
        return len(self.owner) - 1

    def __len__(self):
        return len(self.owner)

    def check(self):
        n = len(self)
        for v, succ in enumerate(self.moves):
            for w in succ:
                if not 0 <= w < n:
                    raise ValueError('move %d -> %d leaves the board' % (v, w))


@dataclass
class Solution:
    winner: list
    strategy: dict

    def wins(self, v, player=EXISTS):
        return self.winner[v] == player


def _attractor(target, player, nodes, owner, moves, preds, strategy):
    """Positions in ``nodes`` from which ``player`` can force a visit to ``target``."""
    attr = set(target)
    count = {}
    queue = deque(attr)
    while queue:
        v = queue.popleft()
        for u in preds[v]:
            if u not in nodes or u in attr:
                continue
            if owner[u] == player:
                attr.add(u)
                strategy[u] = v
                queue.append(u)
            else:
                c = count.get(u)
                if c is None:
                    c = sum(1 for w in moves[u] if w in nodes)
                c -= 1
                count[u] = c
                if c == 0:
                    attr.add(u)
                    queue.append(u)
    return attr


def _zielonka(nodes, owner, moves, preds, priority, strategy):
    """Return (win_exists, win_forall) for the subgame induced by ``nodes``.

    Every node in ``nodes`` is assumed to have a successor inside ``nodes``.
    """
    won = (set(), set())
    nodes = set(nodes)
    while nodes:
        d = max(priority[v] for v in nodes)
        i = d % 2
        top = [v for v in nodes if priority[v] == d]
        attr_strat = {}
        a = _attractor(top, i, nodes, owner, moves, preds, attr_strat)
        sub = _zielonka(nodes - a, owner, moves, preds, priority, strategy)
        if not sub[1 - i]:
            for v in top:
                if owner[v] == i:
                    strategy[v] = next(w for w in moves[v] if w in nodes)
            strategy.update(attr_strat)
            won[i].update(nodes)
            won[i].update(sub[i])
            return won
        b_strat = {}
        b = _attractor(sub[1 - i], 1 - i, nodes, owner, moves, preds, b_strat)
        strategy.update(b_strat)
        won[1 - i].update(b)
        nodes -= b
    return won


def solve(game):
    """Solve ``game`` with the recursive attractor algorithm.

    Returns a :class:`Solution` with the winner of each position and a
    positional strategy for each position owned by its winner that has moves.
    """
    n = len(game)
    owner = list(game.owner)
    moves = [list(m) for m in game.moves]
    priority = list(game.priority)
    # Dead ends are redirected to sinks won by the opponent of the stuck player.
    win_e = n
    win_a = n + 1
    owner += [EXISTS, FORALL]
    priority += [0, 1]
    moves += [[win_e], [win_a]]
    for v in range(n):
        if not moves[v]:
            moves[v] = [win_a] if owner[v] == EXISTS else [win_e]
    preds = [[] for _ in range(n + 2)]
    for v, succ in enumerate(moves):
        for w in succ:
            preds[w].append(v)
    strategy = {}
    won = _zielonka(set(range(n + 2)), owner, moves, preds, priority, strategy)
    winner = [EXISTS if v in won[EXISTS] else FORALL for v in range(n)]
    strat = {}
    for v in range(n):
        if game.moves[v] and owner[v] == winner[v]:
            w = strategy.get(v)
            if w is None or w >= n or winner[w] != winner[v]:
                w = next(x for x in game.moves[v] if winner[x] == winner[v])
            strat[v] = w
    return Solution(winner, strat)


def validate_strategy(game, sol):
    """Check that each player's strategy wins from their whole region.

    Returns a list of problems (empty when the solution is sound).  In the
    graph where the region owner follows its strategy and the opponent moves
    freely, no play may leave the region, no dead end may belong to the region
    owner, and every cycle must have a top priority of the owner's parity.
    """
    problems = []
    n = len(game)
    for player in (EXISTS, FORALL):
        region = [v for v in range(n) if sol.winner[v] == player]
        rset = set(region)
        succ = {}
        for v in region:
            if game.owner[v] == player:
                if not game.moves[v]:
                    problems.append('position %d: stuck in own winning region' % v)
                    succ[v] = []
                    continue
                w = sol.strategy.get(v)
                if w is None or w not in game.moves[v]:
                    problems.append('position %d: missing or illegal strategy move' % v)
                    succ[v] = []
                    continue
                succ[v] = [w]
            else:
                succ[v] = list(game.moves[v])
            for w in succ[v]:
                if w not in rset:
                    problems.append('position %d: play escapes region to %d' % (v, w))
        # A losing cycle exists iff some position of bad parity p lies on a
        # cycle through positions of priority <= p.
        for v in region:
            p = game.priority[v]
            if p % 2 == player:
                continue
            allowed = {u for u in region if game.priority[u] <= p}
            seen = set()
            stack = [w for w in succ[v] if w in allowed]
            found = False
            while stack:
                u = stack.pop()
                if u == v:
                    found = True
                    break
                if u in seen:
                    continue
                seen.add(u)
                stack.extend(w for w in succ.get(u, ()) if w in allowed)
            if found:
                problems.append('position %d: losing cycle with priority %d' % (v, p))
    return problems


def to_dot(game, sol=None):
    lines = ['digraph parity {']
    for v in range(len(game)):
        shape = 'diamond' if game.owner[v] == EXISTS else 'box'
        label = game.labels[v] if game.labels and game.labels[v] is not None else v
        color = ''
        if sol is not None:
            color = ', color=%s' % ('blue' if sol.winner[v] == EXISTS else 'red')
        lines.append('  %d [shape=%s, label="%s / %d"%s];' % (
            v, shape, str(label).replace('"', '\\"'), game.priority[v], color))
        for w in game.moves[v]:
            style = ''
            if sol is not None and sol.strategy.get(v) == w:
                style = ' [penwidth=2]'
            lines.append('  %d -> %d%s;' % (v, w, style))
    lines.append('}')
    return '\n'.join(lines)
