"""Solve a small parity game and validate the winning strategies."""

from cpdl import paritygame as pg

g = pg.ParityGame()
# (owner, priority): max-parity, even priorities favour EXISTS
for owner, pr in [(pg.EXISTS, 1), (pg.FORALL, 2), (pg.EXISTS, 3), (pg.FORALL, 0)]:
    g.add(owner, pr)
g.moves[0] = [1, 2]
g.moves[1] = [0, 3]
g.moves[2] = [2]
g.moves[3] = [1]

sol = pg.solve(g)
for v in range(len(g)):
    who = 'EXISTS' if sol.winner[v] == pg.EXISTS else 'FORALL'
    print('position %d won by %s, strategy move %s' % (v, who, sol.strategy.get(v)))
print('strategy audit:', pg.validate_strategy(g, sol) or 'ok')
print(pg.to_dot(g, sol))
