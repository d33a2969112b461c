import json

import pytest

from cpdl.calculus import LEFT, RIGHT, split
from cpdl.generators import make_rng, random_formula, random_model
from cpdl.prover import (CyclicProof, ProofNode, ResourceLimit, build_game,
                         check_proof, decide, proof_from_json, proof_to_dot,
                         proof_to_json, uniform_audit)
from cpdl.semantics import mc_compositional, satisfies
from cpdl.syntax import NegProp, Prop, fl_closure_neg, negate, parse

p = Prop('p')


def test_axiom_game_position_has_no_builder_moves():
    g = build_game(split([p], [NegProp('p')]))
    ax = [v for v in range(len(g)) if not g.is_sequent(v) and g.items[v].rule == 'ax1']
    assert ax and all(g.game.moves[v] == [] for v in ax)


def test_focused_star_instance_priority():
    # focused principal diamond: priority 2 (see the decisions ledger)
    g = build_game(split([], focus=parse('<a*>p'), side=LEFT))
    stars = [v for v in range(len(g)) if not g.is_sequent(v) and g.items[v].rule == 'dia_star']
    assert stars
    for v in stars:
        inst = g.items[v]
        if inst.conclusion.focus_side() is None:
            assert g.game.priority[v] == 3
        else:
            assert g.game.priority[v] == (2 if inst.annotation == 'f' else 1)
    assert any(g.items[v].annotation == 'f' for v in stars)
    assert all(g.game.priority[v] == 0 for v in range(len(g)) if g.is_sequent(v))


def test_single_axiom_proof():
    res = decide(split([p, NegProp('p')]))
    assert res.is_proof
    assert len(res.proof) == 1 and res.proof.nodes[res.proof.root].rule == 'ax1'


def test_single_proposition_is_satisfiable():
    res = decide(split([p]))
    assert not res.is_proof
    m = res.countermodel.model
    assert len(m.states) == 1 and m.val['p'] == {res.countermodel.witness}


def test_converse_axiom_has_a_proof():
    phi = split([p, parse('<a>[a^]~p')])
    res = decide(phi)
    assert res.is_proof and check_proof(res.proof, phi, uniform=True) == []
    rng = make_rng(9)
    f = parse('p & <a>[a^]~p')
    for _ in range(100):
        assert not mc_compositional(random_model(rng, 4), f)


def test_star_proof_has_a_successful_repeat():
    phi = split([parse('<a*><a*>p'), parse('[a*]~p')])
    res = decide(phi)
    assert res.is_proof and res.proof.backlinks
    par = res.proof.parent_map()
    for leaf, comp in res.proof.backlinks.items():
        path = []
        v = par[leaf]
        while v != comp:
            path.append(v)
            v = par[v]
        path.append(comp)
        nodes = res.proof.nodes
        assert any(nodes[u].annotation == 'f' and nodes[u].principal is nodes[u].seq.focused()
                   for u in path)


def test_countermodel_examples():
    res = decide(split([parse('<a>p')], [Prop('q')]))
    cm = res.countermodel
    m = cm.model
    assert len(m.states) == 2 and len(m.rel['a']) == 1
    (s, t), = m.rel['a']
    assert s == cm.witness and t in m.val['p'] and s in m.val['q']
    res = decide(split([parse('<a>true'), parse('[a]p')]))
    m = res.countermodel.model
    assert all(t in m.val['p'] for _, t in m.rel['a'])
    assert satisfies(m, res.countermodel.witness, [parse('<a>true'), parse('[a]p')])


def test_converse_countermodel_uses_backward_edges():
    phi = split([parse('<a^>p'), parse('[a^]q | <a^>~q')])
    res = decide(phi)
    cm = res.countermodel
    assert satisfies(cm.model, cm.witness, phi.left.formulas())


def test_checker_rejects_a_retagged_axiom():
    res = decide(split([p, NegProp('p')]))
    res.proof.nodes[res.proof.root].rule = 'and'
    problems = check_proof(res.proof, split([p, NegProp('p')]))
    assert problems and problems[0].node == res.proof.root


def test_checker_rejects_a_wrong_root():
    res = decide(split([p, NegProp('p')]))
    assert check_proof(res.proof, split([p, NegProp('p'), Prop('q')]))


def test_checker_rejects_an_unsuccessful_repeat():
    # <a*>p, [a*]~p without any focus: the repeat path is not successful
    seq = split([parse('<a*>p'), parse('[a*]~p')])
    nodes = {0: ProofNode(0, seq, 'assumption')}
    proof = CyclicProof(0, nodes, {0: 0})
    assert check_proof(proof, seq)


def test_uniform_audit_flags_a_late_axiom():
    dia = parse('<a>q')
    root = split([p, NegProp('p'), dia])
    child = split([p, NegProp('p'), dia], focus=dia, side=LEFT)
    nodes = {0: ProofNode(0, root, 'f', LEFT, dia, 'u', [1]),
             1: ProofNode(1, child, 'ax1', LEFT, p, 'u', [])}
    proof = CyclicProof(0, nodes, {})
    assert check_proof(proof, root) == []
    reasons = [v.reason for v in uniform_audit(proof)]
    assert any('class 1' in r for r in reasons)


def test_json_round_trip_and_dot():
    phi = split([parse('<a*><a*>p')], [parse('[a*]~p')])
    res = decide(phi)
    obj = json.loads(json.dumps(proof_to_json(res.proof)))
    assert set(obj) == {'root', 'nodes', 'backlinks'}
    assert all(isinstance(k, str) for k in obj['backlinks'])
    back = proof_from_json(obj)
    assert check_proof(back, phi, uniform=True) == []
    dot = proof_to_dot(res.proof)
    assert 'style=dashed' in dot


def test_resource_limit():
    with pytest.raises(ResourceLimit):
        decide(split([parse('[a*](p -> [a]p)'), p, parse('<a*>~p')]), max_positions=10)


@pytest.mark.parametrize('seed', range(3))
def test_mirror_symmetry(seed):
    rng = make_rng(50 + seed)
    done = 0
    while done < 30:
        l, r = random_formula(rng, 3), random_formula(rng, 3)
        if len(fl_closure_neg([l, r])) > 20:
            continue
        done += 1
        a = decide(split([l], [r]))
        b = decide(split([r], [l]))
        assert a.is_proof == b.is_proof


def test_split_and_single_component_agree():
    for text in ('p & [a]q', '<a>p & [a]~p', '<a*>p & [a*]~p', '<a^>[a]p & ~p'):
        f = parse(text)
        single = decide(split([f])).is_proof
        assert single == decide(split([f.left], [f.right])).is_proof
        assert single == (not mc_compositional_somewhere(f))


def mc_compositional_somewhere(f):
    res = decide(split([f]))
    if res.is_proof:
        return False
    return res.countermodel.witness in mc_compositional(res.countermodel.model, f)


def test_unsat_formula_via_negation():
    f = parse('[a*](p -> [a]p) -> (p -> [a*]p)')
    res = decide(split([negate(f)]))
    assert res.is_proof
