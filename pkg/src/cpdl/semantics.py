"""Kripke models, compositional model checking and the evaluation game."""

import json
from dataclasses import dataclass, field

from . import paritygame as pg
from .syntax import (Top, Bot, Prop, NegProp, And, Or, Dia, Box, Atom, Seq,
                     Choice, Star, Test, fl_closure, negate, is_fixpoint)

__all__ = ['KripkeModel', 'program_relation', 'mc_compositional', 'mc_game',
           'satisfies', 'load_model', 'dump_model']


@dataclass
class KripkeModel:
    """Finite model with string state ids.

    ``rel`` maps a base action name to its forward edges; the converse action
    reads the same edges backwards.
    """

    states: list
    rel: dict = field(default_factory=dict)
    val: dict = field(default_factory=dict)

    def __post_init__(self):
        self.states = list(self.states)
        known = set(self.states)
        self.rel = {a: frozenset(map(tuple, edges)) for a, edges in self.rel.items()}
        self.val = {p: frozenset(ss) for p, ss in self.val.items()}
        for edges in self.rel.values():
            for s, t in edges:
                if s not in known or t not in known:
                    raise ValueError('edge (%s, %s) mentions an unknown state' % (s, t))
        for ss in self.val.values():
            if not ss <= known:
                raise ValueError('valuation mentions an unknown state')

    def edges(self, atom):
        fwd = self.rel.get(atom.name, frozenset())
        if atom.inverse:
            return frozenset((t, s) for s, t in fwd)
        return fwd

    def successors(self, atom, s):
        return [t for (u, t) in self.edges(atom) if u == s]

    def to_json(self):
        return {
            'states': list(self.states),
            'rel': {a: sorted([list(e) for e in edges]) for a, edges in sorted(self.rel.items())},
            'val': {p: sorted(ss) for p, ss in sorted(self.val.items())},
        }


def load_model(path_or_obj):
    if isinstance(path_or_obj, dict):
        obj = path_or_obj
    else:
        with open(path_or_obj) as fh:
            obj = json.load(fh)
    return KripkeModel([str(s) for s in obj['states']],
                       {a: [(str(s), str(t)) for s, t in e] for a, e in obj.get('rel', {}).items()},
                       {p: [str(s) for s in ss] for p, ss in obj.get('val', {}).items()})


def dump_model(m, path):
    with open(path, 'w') as fh:
        json.dump(m.to_json(), fh, indent=1)


# -- compositional semantics --------------------------------------------------

def _compose(r, s):
    by_src = {}
    for x, y in s:
        by_src.setdefault(x, []).append(y)
    return frozenset((x, z) for x, y in r for z in by_src.get(y, ()))


class _Evaluator:
    def __init__(self, m):
        self.m = m
        self.all = frozenset(m.states)
        self.fmemo = {}
        self.pmemo = {}

    def formula(self, f):
        r = self.fmemo.get(f)
        if r is not None:
            return r
        t = type(f)
        if t is Top:
            r = self.all
        elif t is Bot:
            r = frozenset()
        elif t is Prop:
            r = self.m.val.get(f.name, frozenset())
        elif t is NegProp:
            r = self.all - self.m.val.get(f.name, frozenset())
        elif t is And:
            r = self.formula(f.left) & self.formula(f.right)
        elif t is Or:
            r = self.formula(f.left) | self.formula(f.right)
        elif t is Dia:
            body = self.formula(f.body)
            r = frozenset(s for s, u in self.program(f.prog) if u in body)
        elif t is Box:
            body = self.formula(f.body)
            bad = frozenset(s for s, u in self.program(f.prog) if u not in body)
            r = self.all - bad
        else:
            raise TypeError(f)
        self.fmemo[f] = r
        return r

    def program(self, a):
        r = self.pmemo.get(a)
        if r is not None:
            return r
        t = type(a)
        if t is Atom:
            r = self.m.edges(a)
        elif t is Seq:
            r = _compose(self.program(a.first), self.program(a.second))
        elif t is Choice:
            r = self.program(a.left) | self.program(a.right)
        elif t is Test:
            r = frozenset((s, s) for s in self.formula(a.formula))
        elif t is Star:
            step = self.program(a.body)
            r = frozenset((s, s) for s in self.m.states)
            while True:
                nxt = r | _compose(r, step)
                if nxt == r:
                    break
                r = nxt
        else:
            raise TypeError(a)
        self.pmemo[a] = r
        return r


def program_relation(m, alpha):
    """The accessibility relation of a program, as a set of state pairs."""
    return _Evaluator(m).program(alpha)


def mc_compositional(m, f):
    """The set of states of ``m`` satisfying ``f``."""
    return _Evaluator(m).formula(f)


def satisfies(m, s, formulas):
    ev = _Evaluator(m)
    return all(s in ev.formula(f) for f in formulas)


# -- evaluation game ----------------------------------------------------------

def _owner_and_moves(f, s, m):
    """Owner of position (f, s) and its successor positions."""
    t = type(f)
    if t is Top:
        return pg.FORALL, []
    if t is Bot:
        return pg.EXISTS, []
    if t is Prop:
        return (pg.FORALL if s in m.val.get(f.name, ()) else pg.EXISTS), []
    if t is NegProp:
        return (pg.EXISTS if s in m.val.get(f.name, ()) else pg.FORALL), []
    if t is And:
        return pg.FORALL, [(f.left, s), (f.right, s)]
    if t is Or:
        return pg.EXISTS, [(f.left, s), (f.right, s)]
    a, chi = f.prog, f.body
    dia = t is Dia
    ta = type(a)
    if ta is Atom:
        return (pg.EXISTS if dia else pg.FORALL), [(chi, u) for u in m.successors(a, s)]
    if ta is Seq:
        return pg.EXISTS, [(t(a.first, t(a.second, chi)), s)]
    if ta is Choice:
        return (pg.EXISTS if dia else pg.FORALL), [(t(a.left, chi), s), (t(a.right, chi), s)]
    if ta is Star:
        return (pg.EXISTS if dia else pg.FORALL), [(t(a.body, f), s), (chi, s)]
    if ta is Test:
        if dia:
            return pg.FORALL, [(a.formula, s), (chi, s)]
        return pg.EXISTS, [(negate(a.formula), s), (chi, s)]
    raise TypeError(f)


def build_eval_game(m, f):
    """Evaluation game over ``fl_closure(f) x states``; returns (game, index)."""
    game = pg.ParityGame()
    index = {}
    pending = []
    for g in fl_closure(f):
        for s in m.states:
            pos = (g, s)
            owner, succ = _owner_and_moves(g, s, m)
            prio = 1 if (type(g) is Dia and is_fixpoint(g)) else 0
            index[pos] = game.add(owner, prio, pos)
            pending.append((pos, succ))
    for pos, succ in pending:
        game.moves[index[pos]] = [index[q] for q in succ]
    return game, index


def mc_game(m, s, f):
    """Decide ``m, s |= f`` by solving the evaluation game."""
    game, index = build_eval_game(m, f)
    sol = pg.solve(game)
    return sol.winner[index[(f, s)]] == pg.EXISTS
