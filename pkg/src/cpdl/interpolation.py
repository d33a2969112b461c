"""Craig interpolants read off uniform cyclic split proofs.

The proof is cut into clusters (strongly connected components of the tree
plus back edges).  Singleton clusters use the classical Maehara combinators;
proper clusters go through a quasi-proof over the right-hand labels of the
cluster, whose pre-interpolants assemble the cluster root's interpolant.
Every interpolant returned by :func:`interpolate` has been checked by the
prover and the proof checker.
"""

from dataclasses import dataclass, field
from typing import Optional

from .calculus import LEFT, RIGHT, AnnotatedSequent, split
from .prover import decide, check_proof, VerificationFailure, ResourceLimit
from .syntax import (TOP, BOT, Top, Bot, Prop, And, Or, Dia, Box, Seq, Choice,
                     Star, Test, negate, conj, disj, vocabulary, substitute,
                     to_str)

__all__ = ['ClusterDecomposition', 'QuasiProof', 'QNode', 'InterpolationResult',
           'NotValid', 'NotImplicit', 'VerificationReport', 'NonUniformProof',
           'MissingExitInterpolant', 'QuasiProofViolation', 'clusters',
           'maehara_step', 'build_quasi_proof', 'pre_interpolants',
           'proof_interpolant', 'interpolate', 'verify_interpolant',
           'beth_definition', 'simplify', 'audit_quasi_proof']

TRUE_TEST = Test(TOP)


class NonUniformProof(ValueError):
    pass


class MissingExitInterpolant(KeyError):
    pass


class QuasiProofViolation(AssertionError):
    pass


# -- clusters -----------------------------------------------------------------

@dataclass
class ClusterDecomposition:
    clusters: list              # list of frozensets of node ids, sinks first
    cluster_of: dict            # node id -> index into clusters
    roots: list                 # root node of each cluster
    exits: list                 # exit nodes of each cluster

    def is_proper(self, i):
        return len(self.clusters[i]) > 1


def clusters(proof):
    """Strongly connected components of tree edges plus back links."""
    succ = {n.id: list(n.children) for n in proof.nodes.values()}
    for leaf, comp in proof.backlinks.items():
        succ[leaf].append(comp)
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comps = []
    counter = 0
    for start in sorted(succ):
        if start in index:
            continue
        work = [(start, iter(succ[start]))]
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                comps.append(frozenset(comp))
    cluster_of = {}
    for i, c in enumerate(comps):
        for v in c:
            cluster_of[v] = i
    par = proof.parent_map()
    roots = []
    exits = []
    for i, c in enumerate(comps):
        r = [v for v in c if par.get(v) not in c]
        if len(r) != 1:
            raise QuasiProofViolation('cluster %d is not a subtree' % i)
        roots.append(r[0])
        exits.append(sorted(ch for v in c for ch in proof.nodes[v].children if ch not in c))
    return ClusterDecomposition(comps, cluster_of, roots, exits)


# -- singleton clusters ---------------------------------------------------------

def maehara_step(node, child_thetas, child_seqs=()):
    """Interpolant of a node from interpolants of its children.

    The interpolant ``t`` of ``L || R`` satisfies: ``L, t`` and ``~t, R``
    are both unsatisfiable, with ``t`` in the shared vocabulary.
    ``child_seqs`` is only consulted by the modal rule.
    """
    seq = node.seq
    if seq.left.is_empty():
        return BOT
    if seq.right.is_empty():
        return TOP
    rule = node.rule
    if rule == 'ax2':
        return TOP if node.side == LEFT else BOT
    if rule == 'ax1':
        f = node.principal
        if negate(f) in seq.component(node.side).formulas():
            return TOP if node.side == LEFT else BOT
        # cross-component pair: the right-hand formula interpolates
        return f if node.side == RIGHT else negate(f)
    if rule == 'modal':
        child = child_seqs[0] if child_seqs else None
        if node.side == LEFT:
            if child is not None and child.right.is_empty():
                return TOP
            return Box(node.principal.prog, child_thetas[0])
        if child is not None and child.left.is_empty():
            return BOT
        return Dia(node.principal.prog, child_thetas[0])
    if len(child_thetas) == 1:
        return child_thetas[0]
    if len(child_thetas) == 2:
        if node.side == LEFT:
            return And(child_thetas[0], child_thetas[1])
        return Or(child_thetas[0], child_thetas[1])
    raise ValueError('no interpolation step for rule %s' % rule)


# -- quasi-proofs -------------------------------------------------------------

@dataclass
class QNode:
    id: int
    type: int
    label: AnnotatedSequent
    parent: Optional[int] = None
    children: list = field(default_factory=list)
    kind: Optional[str] = None          # 'repeat', 'exit' or None
    companion: Optional[int] = None
    action: object = None               # atom of a modal type-3 node
    cycs: set = field(default_factory=set)
    K: set = field(default_factory=set)


@dataclass
class QuasiProof:
    nodes: list
    root: int
    exit_thetas: dict                   # label -> exit interpolant
    modal_labels: set
    mirrored: bool = False

    def ancestors(self, x):
        out = []
        p = self.nodes[x].parent
        while p is not None:
            out.append(p)
            p = self.nodes[p].parent
        return out

    def companions(self):
        return {n.companion for n in self.nodes if n.kind == 'repeat'}

    def to_dot(self):
        lines = ['digraph quasiproof {', '  rankdir=BT;']
        for n in self.nodes:
            extra = '' if n.kind is None else ' (%s)' % n.kind
            lines.append('  %d [label="%d: type %d%s\\n%s"];' % (
                n.id, n.id, n.type, extra, str(n.label).replace('"', '\\"')))
            for c in n.children:
                lines.append('  %d -> %d [dir=back];' % (n.id, c))
            if n.companion is not None:
                lines.append('  %d -> %d [style=dashed];' % (n.id, n.companion))
        lines.append('}')
        return '\n'.join(lines)


class _View:
    """A cluster seen with its focused side as the right-hand side."""

    def __init__(self, proof, mirror):
        self.proof = proof
        self.mirror = mirror

    def right(self, nid):
        s = self.proof.nodes[nid].seq
        return s.left if self.mirror else s.right

    def left(self, nid):
        s = self.proof.nodes[nid].seq
        return s.right if self.mirror else s.left

    def is_right_rule(self, nid):
        side = self.proof.nodes[nid].side
        return side == (LEFT if self.mirror else RIGHT)


def build_quasi_proof(proof, members, exits, exit_thetas, mirror=False):
    """Quasi-proof of a proper cluster whose focus sits on the right.

    ``exit_thetas`` maps each exit node to an interpolant of its sequent, in
    the cluster's orientation (negated beforehand for mirrored clusters).
    """
    view = _View(proof, mirror)
    nodes = proof.nodes
    root = [v for v in members if all(v not in nodes[u].children for u in members)][0]
    f_c = {view.right(t) for t in members}
    by_label = {}
    for t in members:
        if view.is_right_rule(t):
            by_label.setdefault(view.right(t), []).append(t)
    for t in exits:
        if t not in exit_thetas:
            raise MissingExitInterpolant(t)
    theta_by_label = {}
    for t in exits:
        theta_by_label.setdefault(view.right(t), []).append(exit_thetas[t])
    label_theta = {lab: conj(ths) for lab, ths in theta_by_label.items()}

    rules = {}
    modal_labels = set()
    for lab, ts in by_label.items():
        sigs = set()
        for t in ts:
            n = nodes[t]
            sigs.add((n.rule, n.principal, tuple(view.right(c) for c in n.children)))
        if len(sigs) != 1:
            raise NonUniformProof('label %s has %d different right rules' % (lab, len(sigs)))
        rule, principal, child_labels = sigs.pop()
        rules[lab] = (rule, principal, child_labels)
        if rule == 'modal':
            modal_labels.add(lab)

    q = []

    def add(typ, label, parent):
        n = QNode(len(q), typ, label, parent)
        q.append(n)
        if parent is not None:
            q[parent].children.append(n.id)
        return n.id

    rq = add(1, view.right(root), None)
    work = [rq]
    while work:
        x = work.pop()
        n = q[x]
        if n.type == 1:
            comp = None
            p = n.parent
            while p is not None:
                if q[p].type == 1 and q[p].label == n.label:
                    comp = p
                    break
                p = q[p].parent
            if comp is not None:
                n.kind = 'repeat'
                n.companion = comp
                continue
            if n.label not in f_c:
                n.kind = 'exit'
                continue
            work.append(add(2, n.label, x))
        elif n.type == 2:
            work.append(add(3, n.label, x))
        else:
            if n.label not in rules:
                raise QuasiProofViolation('label %s has no right rule in the cluster' % n.label)
            rule, principal, child_labels = rules[n.label]
            if rule == 'modal':
                n.action = principal.prog
            for lab in child_labels:
                work.append(add(1, lab, x))
    qp = QuasiProof(q, rq, label_theta, modal_labels, mirror)
    _compute_cycles(qp)
    return qp


def _compute_cycles(qp):
    for z in qp.nodes:
        if z.kind != 'repeat':
            continue
        x = z.id
        while x != z.companion:
            qp.nodes[x].cycs.add(z.id)
            qp.nodes[x].K.add(z.companion)
            x = qp.nodes[x].parent


def audit_quasi_proof(qp):
    """Structural facts every quasi-proof must satisfy; returns violations."""
    out = []
    q = qp.nodes
    root = q[qp.root]
    if root.type != 1:
        out.append('root has type %d' % root.type)
    if root.K or root.cycs:
        out.append('root has non-empty K or cycs')
    companions = qp.companions()
    for n in q:
        if n.type == 1 and n.kind is None:
            if len(n.children) != 1 or q[n.children[0]].type != 2 or q[n.children[0]].label != n.label:
                out.append('node %d: type-1 node without a matching type-2 child' % n.id)
        if n.type == 2:
            if len(n.children) != 1 or q[n.children[0]].type != 3 or q[n.children[0]].label != n.label:
                out.append('node %d: type-2 node without a matching type-3 child' % n.id)
        if n.type == 3 and any(q[c].type != 1 for c in n.children):
            out.append('node %d: type-3 node with a child not of type 1' % n.id)
        if (not n.children or n.id in companions) and n.type != 1:
            out.append('node %d: leaf or companion not of type 1' % n.id)
        if n.label.focused is None:
            out.append('node %d: label without focus' % n.id)
        if n.id in n.K:
            out.append('node %d: belongs to its own K' % n.id)
        if n.children and n.id not in companions:
            cy = set().union(*(q[c].cycs for c in n.children))
            kk = set().union(*(q[c].K for c in n.children))
            if cy != n.cycs or kk != n.K:
                out.append('node %d: cycs/K differ from the union over children' % n.id)
        if len(n.children) == 1:
            c = q[n.children[0]]
            if not (n.cycs <= c.cycs and n.K <= c.K):
                out.append('node %d: cycs/K not included in the child' % n.id)
        if n.kind == 'repeat':
            foci = set()
            x = n.id
            while True:
                foci.add(q[x].label.focused)
                if x == n.companion:
                    break
                x = q[x].parent
            if len(foci) < 2:
                out.append('node %d: repeat path keeps a single focused formula' % n.id)
    return out


@dataclass
class PreInterpolants:
    psi: dict           # qnode -> formula
    alpha: dict         # (qnode, companion) -> program
    theta: object

    def iota(self, x, qp):
        """Pre-interpolant with internal variables ``q_y`` made explicit."""
        parts = [self.psi[x]]
        for y in sorted(qp.nodes[x].K):
            parts.append(Dia(self.alpha[(x, y)], Prop('q__%d' % y)))
        return disj(parts)


def pre_interpolants(qp):
    """Leaf-to-root computation of the pre-interpolant table."""
    q = qp.nodes
    psi = {}
    alpha = {}
    companions = qp.companions()
    order = []
    stack = [qp.root]
    while stack:
        x = stack.pop()
        order.append(x)
        stack.extend(q[x].children)
    for x in reversed(order):
        n = q[x]
        if n.kind == 'repeat':
            psi[x] = BOT
            alpha[(x, n.companion)] = TRUE_TEST
        elif n.kind == 'exit':
            psi[x] = qp.exit_thetas.get(n.label, TOP)
        elif n.type == 1:
            (z,) = n.children
            if x in companions:
                loop = Star(alpha[(z, x)])
                psi[x] = Dia(loop, psi[z])
                for y in n.K:
                    alpha[(x, y)] = Seq(loop, alpha[(z, y)])
            else:
                psi[x] = psi[z]
                for y in n.K:
                    alpha[(x, y)] = alpha[(z, y)]
        elif n.type == 2:
            (z,) = n.children
            test = Test(qp.exit_thetas.get(n.label, TOP))
            psi[x] = Dia(test, psi[z])
            for y in n.K:
                alpha[(x, y)] = Seq(test, alpha[(z, y)])
        elif n.action is not None:
            (z,) = n.children
            psi[x] = Dia(n.action, psi[z])
            for y in n.K:
                alpha[(x, y)] = Seq(n.action, alpha[(z, y)])
        else:
            psi[x] = disj(psi[z] for z in n.children)
            for y in n.K:
                progs = [alpha[(z, y)] for z in n.children if y in q[z].K]
                prog = progs[0]
                for p in progs[1:]:
                    prog = Choice(prog, p)
                alpha[(x, y)] = prog
    return PreInterpolants(psi, alpha, psi[qp.root])


# -- whole proofs ---------------------------------------------------------------

@dataclass
class ProofInterpolation:
    theta: object
    node_thetas: dict
    decomposition: ClusterDecomposition
    quasi_proofs: list


def proof_interpolant(proof, audit=True):
    """Interpolant of the root sequent of a uniform cyclic split proof."""
    dec = clusters(proof)
    nodes = proof.nodes
    theta = {}
    qps = []
    for i, members in enumerate(dec.clusters):
        r = dec.roots[i]
        seq = nodes[r].seq
        if seq.left.is_empty():
            theta[r] = BOT
            continue
        if seq.right.is_empty():
            theta[r] = TOP
            continue
        if not dec.is_proper(i):
            n = nodes[r]
            theta[r] = maehara_step(n, [theta[c] for c in n.children],
                                    [nodes[c].seq for c in n.children])
            continue
        fside = seq.focus_side()
        if fside is None:
            raise QuasiProofViolation('proper cluster rooted at an unfocused node')
        mirror = fside == LEFT
        if audit:
            for t in members:
                s = nodes[t].seq
                if s.left.is_empty() or s.right.is_empty():
                    raise QuasiProofViolation('cluster node %d has an empty component' % t)
                if s.focus_side() != fside:
                    raise QuasiProofViolation('cluster node %d changes focus side' % t)
                if not any(c in members for c in nodes[t].children) and t not in proof.backlinks:
                    raise QuasiProofViolation('cluster node %d has no child in the cluster' % t)
        ex = {t: (negate(theta[t]) if mirror else theta[t]) for t in dec.exits[i]}
        qp = build_quasi_proof(proof, members, dec.exits[i], ex, mirror)
        if audit:
            problems = audit_quasi_proof(qp)
            if problems:
                raise QuasiProofViolation('; '.join(problems))
        pre = pre_interpolants(qp)
        qps.append(qp)
        theta[r] = negate(pre.theta) if mirror else pre.theta
    return ProofInterpolation(theta[proof.root], theta, dec, qps)


# -- simplification -------------------------------------------------------------

def _operands(t, g):
    out = []
    stack = [g]
    while stack:
        x = stack.pop()
        if type(x) is t:
            stack.append(x.right)
            stack.append(x.left)
        else:
            out.append(x)
    return out


def _flat(t, parts):
    """Flatten, deduplicate and absorb an n-ary conjunction or disjunction."""
    unit, zero = (TOP, BOT) if t is And else (BOT, TOP)
    dual = Or if t is And else And
    seen = []
    for x in parts:
        for y in (_operands(t, x) if type(x) is t else [x]):
            if y is zero:
                return zero
            if y is not unit and y not in seen:
                seen.append(y)
    present = set(seen)
    if any(negate(y) in present for y in seen):
        return zero
    # absorption: x & (x | y) == x
    kept = [y for y in seen
            if not (type(y) is dual and any(z in present for z in _operands(dual, y)))]
    return conj(kept) if t is And else disj(kept)


def simplify(f):
    """Light equivalence-preserving clean-up of formulas."""
    memo = {}

    def prog(a):
        if a in memo:
            return memo[a]
        t = type(a)
        if t is Test:
            r = Test(form(a.formula))
        elif t is Seq:
            x, y = prog(a.first), prog(a.second)
            if x is TRUE_TEST:
                r = y
            elif y is TRUE_TEST:
                r = x
            elif x is Test(BOT) or y is Test(BOT):
                r = Test(BOT)
            else:
                r = Seq(x, y)
        elif t is Choice:
            x, y = prog(a.left), prog(a.right)
            if x is y or y is Test(BOT):
                r = x
            elif x is Test(BOT):
                r = y
            else:
                r = Choice(x, y)
        elif t is Star:
            x = prog(a.body)
            if type(x) is Test:
                r = TRUE_TEST
            elif type(x) is Star:
                r = x
            else:
                r = Star(x)
        else:
            r = a
        memo[a] = r
        return r

    def form(g):
        if g in memo:
            return memo[g]
        t = type(g)
        if t is And or t is Or:
            r = _flat(t, [form(x) for x in _operands(t, g)])
        elif t is Dia or t is Box:
            a, b = prog(g.prog), form(g.body)
            if a is TRUE_TEST:
                r = b
            elif t is Dia and (b is BOT or a is Test(BOT)):
                r = BOT
            elif t is Box and (b is TOP or a is Test(BOT)):
                r = TOP
            elif type(a) is Test:
                r = form(And(a.formula, b) if t is Dia else Or(negate(a.formula), b))
            else:
                r = t(a, b)
        else:
            r = g
        memo[g] = r
        return r

    prev = None
    cur = f
    while cur is not prev:
        prev, cur = cur, form(cur)
        memo.clear()
    return cur


# -- end-to-end ---------------------------------------------------------------

@dataclass
class VerificationReport:
    vocabulary_ok: bool
    entails_psi: bool           # theta |= psi
    entailed_by_phi: bool       # phi |= theta
    proofs: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)
    exhausted: bool = False     # a check ran out of resources, not a refutation

    @property
    def ok(self):
        return self.vocabulary_ok and self.entails_psi and self.entailed_by_phi


def verify_interpolant(phi, psi, theta, **kw):
    """Check the three interpolant conditions, each independently."""
    errors = []
    voc_ok = vocabulary(theta) <= (vocabulary(phi) & vocabulary(psi))
    if not voc_ok:
        errors.append('vocabulary of the interpolant is not shared')
    proofs = {}
    results = []
    exhausted = False
    for name, seq in (('theta_entails_psi', split([theta, negate(psi)])),
                      ('phi_entails_theta', split([phi, negate(theta)]))):
        try:
            r = decide(seq, **kw)
        except ResourceLimit as e:
            exhausted = True
            errors.append('%s: %s' % (name, e))
            results.append(False)
            continue
        except Exception as e:  # report, do not raise
            errors.append('%s: %s' % (name, e))
            results.append(False)
            continue
        ok = r.is_proof and not check_proof(r.proof, seq)
        if r.is_proof:
            proofs[name] = r.proof
        if not ok:
            errors.append('%s does not hold' % name)
        results.append(ok)
    return VerificationReport(voc_ok, results[0], results[1], proofs, errors, exhausted)


@dataclass
class InterpolationResult:
    phi: object
    psi: object
    theta: object
    raw_theta: object
    report: VerificationReport
    proof: object = None
    quasi_proofs: list = field(default_factory=list)

    @property
    def vocab_ok(self):
        return self.report.vocabulary_ok

    @property
    def proofs(self):
        return self.report.proofs


@dataclass
class NotValid:
    countermodel: object


@dataclass
class NotImplicit:
    countermodel: object


def interpolate(phi, psi, simplify_result=True, **kw):
    """Interpolant for ``phi |= psi`` or a countermodel of ``phi & ~psi``."""
    root = split([negate(psi)], [phi])
    res = decide(root, **kw)
    if not res.is_proof:
        return NotValid(res.countermodel)
    pi = proof_interpolant(res.proof)
    theta = simplify(pi.theta) if simplify_result else pi.theta
    report = verify_interpolant(phi, psi, theta, **kw)
    if not report.ok and report.exhausted and report.vocabulary_ok:
        raise ResourceLimit('could not verify interpolant: %s' % '; '.join(report.errors))
    if not report.ok:
        raise VerificationFailure('interpolant %s failed: %s' % (to_str(theta), '; '.join(report.errors)))
    return InterpolationResult(phi, psi, theta, pi.theta, report, res.proof, pi.quasi_proofs)


def _fresh(base, taken):
    i = 0
    while True:
        name = '%s_%d' % (base, i)
        if name not in taken:
            return name
        i += 1


def beth_definition(phi, p, **kw):
    """Explicit definition of ``p`` from an implicit definition ``phi``.

    Returns an :class:`InterpolationResult` whose ``theta`` mentions neither
    ``p`` nor the fresh copies, or :class:`NotImplicit` with a countermodel.
    """
    if isinstance(p, Prop):
        p = p.name
    taken = vocabulary(phi).props | vocabulary(phi).actions
    p0 = _fresh(p, taken)
    p1 = _fresh(p, taken | {p0})
    left = And(substitute(phi, p, Prop(p0)), Prop(p0))
    right = Or(negate(substitute(phi, p, Prop(p1))), Prop(p1))
    res = interpolate(left, right, **kw)
    if isinstance(res, NotValid):
        return NotImplicit(res.countermodel)
    return res
