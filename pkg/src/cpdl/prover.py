"""Proof search as a parity game, cyclic proofs, countermodels and checking.

``decide`` builds the game between Prover (who picks rule instances) and
Builder (who picks premises), solves it, and returns either a cyclic proof
that passes :func:`check_proof` or a countermodel verified by the
compositional model checker.
"""

import json
import time
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from . import paritygame as pg
from .calculus import (LEFT, RIGHT, SIDES, AnnotatedSequent, SplitSequent,
                       ContextViolation, Unclassifiable, enumerate_instances,
                       prover_moves, priority_class, root_context,
                       check_context, is_saturated, split)
from .semantics import KripkeModel, mc_compositional
from .syntax import Dia, parse, to_str, vocabulary

PROVER = pg.EXISTS
BUILDER = pg.FORALL

__all__ = ['ResourceLimit', 'VerificationFailure', 'InternalError', 'SearchGame',
           'CyclicProof', 'ProofNode', 'Violation', 'Countermodel', 'Proof',
           'Sat', 'build_game', 'decide', 'uniform_strategy',
           'extract_cyclic_proof', 'extract_countermodel', 'check_proof',
           'instance_priority', 'proof_to_json', 'proof_from_json',
           'proof_to_dot', 'sequent_from_strings']


class ResourceLimit(RuntimeError):
    pass


class VerificationFailure(RuntimeError):
    pass


class InternalError(RuntimeError):
    pass


def instance_priority(inst):
    """Priority of a Builder position.

    3 when the conclusion has no focus, 2 when the focused formula is the
    principal of a rule other than ``u`` (this includes the modal rule), and 1
    otherwise.  An infinite play is therefore won by Prover exactly when it is
    eventually focused and the focused formula is principal infinitely often.
    """
    fside = inst.conclusion.focus_side()
    if fside is None:
        return 3
    if inst.annotation == 'f' and inst.rule != 'u' and inst.side == fside:
        return 2
    return 1


@dataclass
class SearchGame:
    root: SplitSequent
    game: pg.ParityGame
    index: dict              # sequent -> position
    items: list              # position -> SplitSequent or RuleInstance
    classes: dict            # sequent position -> priority class of its moves

    def is_sequent(self, v):
        return self.game.owner[v] == PROVER

    def __len__(self):
        return len(self.game)


def build_game(phi, max_positions=2_000_000, deadline=None):
    """Reachable part of the pruned proof-search game from ``phi``."""
    game = pg.ParityGame()
    index = {}
    items = []
    classes = {}

    def seq_pos(s):
        v = index.get(s)
        if v is None:
            v = game.add(PROVER, 0)
            items.append(s)
            index[s] = v
            queue.append(v)
        return v

    queue = deque()
    seq_pos(phi)
    steps = 0
    while queue:
        v = queue.popleft()
        sigma = items[v]
        cls, insts = prover_moves(sigma)
        classes[v] = cls
        succ = []
        for inst in insts:
            w = game.add(BUILDER, instance_priority(inst))
            items.append(inst)
            succ.append(w)
            game.moves[w] = [seq_pos(p) for p in inst.premises]
        game.moves[v] = succ
        if len(game) > max_positions:
            raise ResourceLimit('game exceeds %d positions' % max_positions)
        steps += 1
        if deadline is not None and steps % 256 == 0 and time.monotonic() > deadline:
            raise ResourceLimit('time budget exhausted while building the game')
    return SearchGame(phi, game, index, items, classes)


def uniform_strategy(g, sol):
    """Positional Prover strategy on her winning region.

    The move set is already restricted to the minimal priority class, and
    classes 1-5 offer a single canonical instance, so uniformity only
    constrains those.  In class 6 the solver's winning choice is kept: picking
    an arbitrary winning-region move there could close a losing cycle.
    """
    strat = {}
    for v in range(len(g.items)):
        if g.game.owner[v] != PROVER or sol.winner[v] != PROVER:
            continue
        moves = g.game.moves[v]
        if len(moves) == 1:
            strat[v] = moves[0]
        else:
            strat[v] = sol.strategy[v]
    return strat


# -- cyclic proofs ------------------------------------------------------------

@dataclass
class ProofNode:
    id: int
    seq: SplitSequent
    rule: str                       # rule name, or 'assumption' for repeat leaves
    side: Optional[str] = None
    principal: object = None
    annotation: Optional[str] = None
    children: list = field(default_factory=list)


@dataclass
class CyclicProof:
    root: int
    nodes: dict
    backlinks: dict

    def __len__(self):
        return len(self.nodes)

    def parent_map(self):
        par = {}
        for n in self.nodes.values():
            for c in n.children:
                par[c] = n.id
        return par

    def path_to(self, nid, par=None):
        par = self.parent_map() if par is None else par
        path = [nid]
        while path[-1] in par:
            path.append(par[path[-1]])
        return path[::-1]


class Violation(NamedTuple):
    node: Optional[int]
    reason: str

    def __str__(self):
        return 'node %s: %s' % (self.node, self.reason)


def extract_cyclic_proof(g, strategy, max_nodes=500_000):
    """Unfold Prover's strategy into a finite tree with back edges.

    A branch is closed as a repeat leaf at the first sequent that already
    occurs on it; under a winning strategy the path from that nearest equal
    ancestor is successful.
    """
    nodes = {}
    backlinks = {}
    on_path = {}

    def new_node(v):
        nid = len(nodes)
        sigma = g.items[v]
        if v in on_path:
            nodes[nid] = ProofNode(nid, sigma, 'assumption')
            backlinks[nid] = on_path[v]
            return nid, None
        w = strategy.get(v)
        if w is None:
            raise InternalError('strategy undefined at a reachable sequent')
        inst = g.items[w]
        nodes[nid] = ProofNode(nid, sigma, inst.rule, inst.side, inst.principal, inst.annotation)
        return nid, w

    root, w = new_node(g.index[g.root])
    stack = []
    if w is not None:
        on_path[g.index[g.root]] = root
        stack.append([root, g.index[g.root], list(g.game.moves[w]), 0])
    while stack:
        frame = stack[-1]
        nid, v, prem, i = frame
        if i == len(prem):
            del on_path[v]
            stack.pop()
            continue
        frame[3] += 1
        cid, cw = new_node(prem[i])
        nodes[nid].children.append(cid)
        if len(nodes) > max_nodes:
            raise ResourceLimit('proof unfolding exceeds %d nodes' % max_nodes)
        if cw is not None:
            on_path[prem[i]] = cid
            stack.append([cid, prem[i], list(g.game.moves[cw]), 0])
    return CyclicProof(root, nodes, backlinks)


def _node_matches(node, child_seqs, memo=None):
    """The rule instance a node applies, or None; memoized on the node's labels."""
    if memo is not None:
        key = (node.seq, node.rule, node.side, node.principal, node.annotation, tuple(child_seqs))
        if key not in memo:
            memo[key] = _node_matches(node, child_seqs)
        return memo[key]
    cands = enumerate_instances(node.seq, principal=node.principal)
    for inst in cands:
        if inst.rule != node.rule or inst.side != node.side:
            continue
        if node.rule == 'ax1':
            return inst
        if inst.annotation != node.annotation:
            continue
        if list(inst.premises) == child_seqs:
            return inst
    return None


def check_proof(proof, phi, uniform=False):
    """Validate a cyclic proof of ``phi``; returns a list of violations."""
    out = []
    nodes = proof.nodes
    if proof.root not in nodes:
        return [Violation(None, 'root id %s missing' % proof.root)]
    if nodes[proof.root].seq != phi:
        out.append(Violation(proof.root, 'root label differs from the sequent to prove'))
    try:
        ctx = root_context(phi)
    except Exception as e:  # pragma: no cover - defensive
        return [Violation(None, 'bad root sequent: %s' % e)]
    # tree shape
    par = {}
    for n in nodes.values():
        for c in n.children:
            if c not in nodes:
                out.append(Violation(n.id, 'child %s missing' % c))
            elif c in par:
                out.append(Violation(c, 'node has two parents'))
            else:
                par[c] = n.id
    if proof.root in par:
        out.append(Violation(proof.root, 'root has a parent'))
    seen = set()
    stack = [proof.root]
    while stack:
        v = stack.pop()
        if v in seen:
            out.append(Violation(v, 'cycle in the tree edges'))
            continue
        seen.add(v)
        stack.extend(c for c in nodes[v].children if c in nodes)
    for v in nodes:
        if v not in seen:
            out.append(Violation(v, 'unreachable from the root'))
    if out:
        return out

    memo = {}
    ctx_ok = {}
    for n in nodes.values():
        seq = n.seq
        if seq.left.focused is not None and seq.right.focused is not None:
            out.append(Violation(n.id, 'two formulas in focus'))
            continue
        if seq not in ctx_ok:
            try:
                check_context(seq, ctx)
                ctx_ok[seq] = None
            except ContextViolation as e:
                ctx_ok[seq] = str(e)
        if ctx_ok[seq] is not None:
            out.append(Violation(n.id, ctx_ok[seq]))
            continue
        if n.id in proof.backlinks:
            out.extend(_check_repeat(proof, n, par))
            continue
        if n.rule == 'assumption':
            out.append(Violation(n.id, 'open assumption without back link'))
            continue
        child_seqs = [nodes[c].seq for c in n.children]
        inst = _node_matches(n, child_seqs, memo)
        if inst is None:
            out.append(Violation(n.id, 'children do not match any %s instance on %s' % (
                n.rule, 'the principal' if n.principal is None else to_str(n.principal))))
    for leaf in proof.backlinks:
        if leaf not in nodes:
            out.append(Violation(leaf, 'back link from a missing node'))
    if uniform and not out:
        out.extend(uniform_audit(proof, memo))
    return out


def _check_repeat(proof, leaf, par):
    out = []
    nodes = proof.nodes
    comp = proof.backlinks[leaf.id]
    if leaf.children:
        out.append(Violation(leaf.id, 'repeat leaf has children'))
    if leaf.rule != 'assumption':
        out.append(Violation(leaf.id, 'repeat leaf is tagged %s' % leaf.rule))
    path = []
    v = par.get(leaf.id)
    while v is not None and v != comp:
        path.append(v)
        v = par.get(v)
    if v != comp:
        return out + [Violation(leaf.id, 'companion %s is not an ancestor' % comp)]
    if nodes[comp].seq != leaf.seq:
        return out + [Violation(leaf.id, 'companion label differs')]
    for u in path:
        if nodes[u].seq == leaf.seq:
            out.append(Violation(leaf.id, 'companion is not the nearest equal ancestor'))
            break
    full = [comp] + path[::-1]
    if any(nodes[u].seq.focus_side() is None for u in full + [leaf.id]):
        out.append(Violation(leaf.id, 'repeat path has an unfocused sequent'))
    elif not any(nodes[u].annotation == 'f' and nodes[u].principal is not None
                 and nodes[u].principal is nodes[u].seq.focused() for u in full):
        out.append(Violation(leaf.id, 'focused formula is never principal on the repeat path'))
    return out


def uniform_audit(proof, memo=None):
    """Check the uniformity discipline on every rule node.

    At each node the applied instance must come from the least priority class
    available (this subsumes "axioms first" and "saturate unfocused components
    next").  Nodes sharing a focused component whose other component is
    saturated must apply the same rule to the same principal formula, except
    for the modal-or-unfocus choice on an atomic diamond.
    """
    out = []
    groups = {}
    memo = {} if memo is None else memo
    best_class = {}
    saturated = {}
    classes = {}
    for n in proof.nodes.values():
        if n.rule == 'assumption':
            continue
        inst = _node_matches(n, [proof.nodes[c].seq for c in n.children], memo)
        try:
            if inst not in classes:
                classes[inst] = priority_class(inst)
            cls = classes[inst]
        except Unclassifiable:
            out.append(Violation(n.id, '%s instance fits no priority class' % n.rule))
            continue
        if n.seq not in best_class:
            best_class[n.seq] = prover_moves(n.seq)[0]
        best = best_class[n.seq]
        if cls != best:
            out.append(Violation(n.id, 'applies a class-%d rule while class %d is available' % (cls, best)))
        fside = n.seq.focus_side()
        if fside is None or n.side != fside or n.rule in ('u', 'modal', 'ax1', 'ax2'):
            continue
        unf = n.seq.component(RIGHT if fside == LEFT else LEFT)
        if unf not in saturated:
            saturated[unf] = is_saturated(unf)
        if not saturated[unf]:
            continue
        key = (fside, n.seq.component(fside))
        val = (n.rule, n.principal)
        prev = groups.setdefault(key, (val, n.id))
        if prev[0] != val:
            out.append(Violation(n.id, 'differs from node %d with the same focused component' % prev[1]))
    return out


# -- serialization ------------------------------------------------------------

def _comp_json(comp):
    return [[to_str(f), a] for f, a in comp.entries()]


def _comp_from_json(items):
    unf = set()
    foc = None
    for text, ann in items:
        f = parse(text)
        if ann == 'f':
            if foc is not None:
                raise ValueError('two focused formulas in one component')
            foc = f
        else:
            unf.add(f)
    return AnnotatedSequent(frozenset(unf), foc)


def proof_to_json(proof):
    nodes = []
    for nid in sorted(proof.nodes):
        n = proof.nodes[nid]
        nodes.append({
            'id': n.id,
            'seq': {'left': _comp_json(n.seq.left), 'right': _comp_json(n.seq.right)},
            'rule': n.rule,
            'side': n.side,
            'principal': None if n.principal is None else to_str(n.principal),
            'annotation': n.annotation,
            'children': list(n.children),
        })
    return {'root': proof.root, 'nodes': nodes,
            'backlinks': {str(k): v for k, v in sorted(proof.backlinks.items())}}


def proof_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    nodes = {}
    for d in obj['nodes']:
        seq = SplitSequent(_comp_from_json(d['seq']['left']), _comp_from_json(d['seq']['right']))
        p = d.get('principal')
        nodes[int(d['id'])] = ProofNode(int(d['id']), seq, d['rule'], d.get('side'),
                                        None if p is None else parse(p),
                                        d.get('annotation'), [int(c) for c in d.get('children', [])])
    back = {int(k): int(v) for k, v in obj.get('backlinks', {}).items()}
    return CyclicProof(int(obj['root']), nodes, back)


def proof_to_dot(proof):
    lines = ['digraph proof {', '  rankdir=BT;']
    for nid in sorted(proof.nodes):
        n = proof.nodes[nid]
        label = '%s\\n%s' % (str(n.seq).replace('"', '\\"'), n.rule)
        lines.append('  %d [shape=box, label="%s"];' % (nid, label))
        for c in n.children:
            lines.append('  %d -> %d [dir=back];' % (nid, c))
    for leaf, comp in sorted(proof.backlinks.items()):
        lines.append('  %d -> %d [style=dashed];' % (leaf, comp))
    lines.append('}')
    return '\n'.join(lines)


def sequent_from_strings(left, right):
    return split([parse(t) for t in left], [parse(t) for t in right])


# -- countermodels ------------------------------------------------------------

@dataclass
class Countermodel:
    model: KripkeModel
    witness: str
    provenance: dict


def extract_countermodel(g, sol, phi):
    """Build a model of ``phi`` from Builder's winning strategy.

    States are local paths: maximal runs of class 1-5 moves with Builder's
    premise choices.  A modal step on action ``a`` reached from the end of a
    path (possibly after focus changes that start no new run of moves) gives an
    ``a``-edge, read backwards for a converse action.
    """
    moves = g.game.moves
    root = g.index[phi]
    if sol.winner[root] != BUILDER:
        raise ValueError('Prover wins; there is no countermodel')

    def builder_choice(w):
        t = sol.strategy.get(w)
        if t is None:
            raise InternalError('Builder has no move at an instance of his region')
        return t

    path_cache = {}

    def local_path(v):
        if v in path_cache:
            return path_cache[v]
        seqs = [v]
        seen = {v}
        cur = v
        while g.classes[cur] <= 5:
            w = moves[cur][0]
            cur = builder_choice(w)
            if cur in seen:
                raise InternalError('local path does not terminate')
            seen.add(cur)
            seqs.append(cur)
        path_cache[v] = seqs
        return seqs

    states = {}
    order = []
    edges = []
    queue = deque([root])
    states[root] = 0
    order.append(root)
    while queue:
        start = queue.popleft()
        end = local_path(start)[-1]
        # explore focus changes that do not start a new run of moves
        todo = [end]
        visited = {end}
        while todo:
            v = todo.pop()
            for w in moves[v]:
                inst = g.items[w]
                (p,) = moves[w]
                if inst.rule == 'modal':
                    if p not in states:
                        states[p] = len(order)
                        order.append(p)
                        queue.append(p)
                    edges.append((states[start], inst.principal.prog, states[p]))
                elif p not in visited and len(local_path(p)) == 1:
                    visited.add(p)
                    todo.append(p)

    names = ['s%d' % i for i in range(len(order))]
    voc = vocabulary(list(phi.left.formulas()) + list(phi.right.formulas()))
    rel = {a: set() for a in voc.actions}
    for src, atom, dst in edges:
        if atom.inverse:
            rel[atom.name].add((names[dst], names[src]))
        else:
            rel[atom.name].add((names[src], names[dst]))
    val = {p: set() for p in voc.props}
    provenance = {}
    for i, start in enumerate(order):
        seqs = [g.items[v] for v in local_path(start)]
        provenance[names[i]] = [str(s) for s in seqs]
        for s in seqs:
            for f in s.left.formulas() | s.right.formulas():
                if type(f).__name__ == 'Prop':
                    val.setdefault(f.name, set()).add(names[i])
    model = KripkeModel(names, rel, val)
    cm = Countermodel(model, names[0], provenance)
    for f in phi.left.formulas() | phi.right.formulas():
        if names[0] not in mc_compositional(model, f):
            raise VerificationFailure('extracted model falsifies %s at the witness' % to_str(f))
    return cm


# -- top level ----------------------------------------------------------------

@dataclass
class Proof:
    proof: CyclicProof
    game_size: int = 0
    is_proof = True


@dataclass
class Sat:
    countermodel: Countermodel
    game_size: int = 0
    is_proof = False


def decide(phi, max_positions=2_000_000, timeout=None, check=True, uniform=True,
           max_nodes=2_000_000):
    """Decide unsatisfiability of a split sequent.

    Returns :class:`Proof` (a checked cyclic proof) when the union of both
    components is unsatisfiable and :class:`Sat` (a verified countermodel)
    otherwise.
    """
    deadline = None if timeout is None else time.monotonic() + timeout
    g = build_game(phi, max_positions, deadline)
    sol = pg.solve(g.game)
    root = g.index[phi]
    if sol.winner[root] == PROVER:
        strat = uniform_strategy(g, sol)
        proof = extract_cyclic_proof(g, strat, max_nodes)
        if check:
            problems = check_proof(proof, phi, uniform=uniform)
            if problems:
                raise VerificationFailure('emitted proof fails the checker: %s' % '; '.join(map(str, problems[:5])))
        return Proof(proof, len(g))
    return Sat(extract_countermodel(g, sol, phi), len(g))


def decide_formula(f, **kw):
    """Satisfiability of a single formula: Proof means unsatisfiable."""
    return decide(split([f]), **kw)
