import json

import pytest

from cpdl.generators import make_rng, random_formula, random_model, random_program
from cpdl.semantics import (KripkeModel, build_eval_game, dump_model, load_model,
                            mc_compositional, mc_game, program_relation)
from cpdl.syntax import BOT, TOP, Atom, Star, Test, converse, negate, parse

TWO = KripkeModel(['0', '1'], {'a': [('0', '1')]}, {})
LOOP_P = KripkeModel(['s'], {'a': [('s', 's')]}, {'p': ['s']})
LOOP = KripkeModel(['s'], {'a': [('s', 's')]}, {})


def test_program_relations():
    assert program_relation(TWO, Test(TOP)) == {('0', '0'), ('1', '1')}
    assert program_relation(TWO, Star(Atom('a'))) == {('0', '0'), ('1', '1'), ('0', '1')}
    assert program_relation(TWO, Atom('a', True)) == {('1', '0')}


def test_compositional_examples():
    assert mc_compositional(TWO, BOT) == set()
    assert mc_compositional(LOOP_P, parse('<a*>p')) == {'s'}
    assert mc_compositional(LOOP, parse('[a*]~p')) == {'s'}


def test_game_examples():
    assert all(mc_game(TWO, s, TOP) for s in TWO.states)
    assert mc_game(LOOP_P, 's', parse('<a*>p'))
    assert not mc_game(LOOP, 's', parse('<a*>p'))
    assert not mc_game(TWO, '0', parse('<a*>p'))


def test_game_priorities_mark_diamond_fixpoints():
    game, index = build_eval_game(LOOP, parse('<a*>p'))
    assert game.priority[index[(parse('<a*>p'), 's')]] == 1
    assert game.priority[index[(parse('p'), 's')]] == 0


def test_converse_axiom_holds_everywhere():
    rng = make_rng(5)
    f = parse('p -> [a]<a^>p')
    for _ in range(50):
        m = random_model(rng, 5)
        assert mc_compositional(m, f) == set(m.states)


@pytest.mark.parametrize('seed', range(3))
def test_duality_and_converse_relation(seed):
    rng = make_rng(seed)
    for _ in range(40):
        m = random_model(rng, 5)
        f = random_formula(rng, 4)
        assert mc_compositional(m, negate(f)) == set(m.states) - mc_compositional(m, f)
        al = random_program(rng, 3)
        assert program_relation(m, converse(al)) == {(t, s) for s, t in program_relation(m, al)}


def test_unknown_propositions_are_false_and_bad_models_rejected():
    assert mc_compositional(TWO, parse('r')) == set()
    with pytest.raises(ValueError):
        KripkeModel(['s'], {'a': [('s', 't')]}, {})
    with pytest.raises(ValueError):
        KripkeModel(['s'], {}, {'p': ['t']})


def test_model_json_round_trip(tmp_path):
    m = KripkeModel(['s0', 's1'], {'a': [('s0', 's1')], 'b': []}, {'p': ['s1']})
    path = tmp_path / 'm.json'
    dump_model(m, path)
    back = load_model(str(path))
    assert back.to_json() == m.to_json()
    assert json.loads(path.read_text())['rel']['a'] == [['s0', 's1']]
    assert load_model(m.to_json()).to_json() == m.to_json()
