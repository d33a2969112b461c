"""Random formulas, models and parity games for differential testing."""

import random

from . import paritygame as pg
from .semantics import KripkeModel
from .syntax import (TOP, BOT, Prop, NegProp, And, Or, Dia, Box, Atom, Seq,
                     Choice, Star, Test)


def random_program(rng, depth, props=('p', 'q'), actions=('a', 'b')):
    if depth <= 0 or rng.random() < 0.35:
        return Atom(rng.choice(actions), rng.random() < 0.3)
    k = rng.random()
    if k < 0.3:
        return Seq(random_program(rng, depth - 1, props, actions),
                   random_program(rng, depth - 1, props, actions))
    if k < 0.55:
        return Choice(random_program(rng, depth - 1, props, actions),
                      random_program(rng, depth - 1, props, actions))
    if k < 0.85:
        return Star(random_program(rng, depth - 1, props, actions))
    return Test(random_formula(rng, depth - 1, props, actions))


def random_formula(rng, depth, props=('p', 'q'), actions=('a', 'b')):
    """A random NNF formula whose syntax tree is at most ``depth`` deep."""
    if depth <= 0 or rng.random() < 0.2:
        k = rng.random()
        if k < 0.08:
            return TOP
        if k < 0.16:
            return BOT
        name = rng.choice(props)
        return Prop(name) if k < 0.6 else NegProp(name)
    k = rng.random()
    if k < 0.22:
        return And(random_formula(rng, depth - 1, props, actions),
                   random_formula(rng, depth - 1, props, actions))
    if k < 0.44:
        return Or(random_formula(rng, depth - 1, props, actions),
                  random_formula(rng, depth - 1, props, actions))
    cons = Dia if k < 0.72 else Box
    return cons(random_program(rng, depth - 1, props, actions),
                random_formula(rng, depth - 1, props, actions))


def random_model(rng, max_states=6, props=('p', 'q'), actions=('a', 'b'), density=0.3):
    n = rng.randint(1, max_states)
    states = ['s%d' % i for i in range(n)]
    rel = {a: [(s, t) for s in states for t in states if rng.random() < density]
           for a in actions}
    val = {p: [s for s in states if rng.random() < 0.5] for p in props}
    return KripkeModel(states, rel, val)


def random_game(rng, max_positions=8, max_priority=3, max_out=3):
    n = rng.randint(1, max_positions)
    g = pg.ParityGame()
    for _ in range(n):
        g.add(rng.choice((pg.EXISTS, pg.FORALL)), rng.randint(0, max_priority))
    for v in range(n):
        k = rng.randint(0, max_out)
        g.moves[v] = sorted(set(rng.randrange(n) for _ in range(k)))
    return g


def make_rng(seed):
    return random.Random(seed)
