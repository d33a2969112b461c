"""Hypothesis strategies for formulas, programs and models."""

from hypothesis import strategies as st

from cpdl.semantics import KripkeModel
from cpdl.syntax import (BOT, TOP, And, Atom, Box, Choice, Dia, NegProp, Or,
                         Prop, Seq, Star, Test)

PROPS = ('p', 'q', 'r')
ACTIONS = ('a', 'b')

literals = st.one_of(st.just(TOP), st.just(BOT), st.sampled_from(PROPS).map(Prop),
                     st.sampled_from(PROPS).map(NegProp))
atoms = st.builds(Atom, st.sampled_from(ACTIONS), st.booleans())



def programs(formulas, max_leaves=6):
    return st.recursive(
        atoms,
        lambda ps: st.one_of(st.builds(Seq, ps, ps), st.builds(Choice, ps, ps),
                             st.builds(Star, ps), st.builds(Test, formulas)),
        max_leaves=max_leaves)


formulas = st.deferred(lambda: st.recursive(
    literals,
    lambda fs: st.one_of(
        st.builds(And, fs, fs), st.builds(Or, fs, fs),
        st.builds(Dia, programs(literals, 4), fs), st.builds(Box, programs(literals, 4), fs)),
    max_leaves=8))

progs = programs(formulas, 6)


@st.composite
def models(draw, max_states=4):
    n = draw(st.integers(1, max_states))
    states = ['s%d' % i for i in range(n)]
    pairs = [(s, t) for s in states for t in states]
    rel = {a: draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
           for a in ACTIONS}
    val = {p: draw(st.lists(st.sampled_from(states), unique=True, max_size=n)) for p in PROPS}
    return KripkeModel(states, rel, val)
