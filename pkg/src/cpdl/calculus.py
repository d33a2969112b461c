"""Annotated split sequents and the rules of the focused cyclic calculus.

A component is an :class:`AnnotatedSequent`: a set of unfocused formulas plus
at most one focused formula.  A :class:`SplitSequent` pairs a left and a
right component, with at most one focused formula overall.

Rule names used in instances and in proof files::

    ax1 ax2 and or dia_seq box_seq dia_choice box_choice dia_star box_star
    dia_test box_test modal acut weak f u
"""

from typing import NamedTuple, Optional

from .syntax import (Formula, Top, Bot, Prop, NegProp, And, Or, Dia, Box, Atom,
                     Seq, Choice, Star, Test, BOT, negate, converse,
                     fl_closure_neg, order_key, to_str)

LEFT, RIGHT = 'left', 'right'
SIDES = (LEFT, RIGHT)

PRINCIPAL_RULES = ('and', 'or', 'dia_seq', 'box_seq', 'dia_choice', 'box_choice',
                   'dia_star', 'box_star', 'dia_test', 'box_test')
DIAMOND_RULES = ('dia_seq', 'dia_choice', 'dia_star', 'dia_test')
SATURATION_RULES = frozenset(PRINCIPAL_RULES + ('acut',))
ALL_RULES = ('ax1', 'ax2') + PRINCIPAL_RULES + ('modal', 'acut', 'weak', 'f', 'u')
# Deterministic preference inside the cumulative classes: one-premise rules,
# then branching rules, cuts last.
_RULE_RANK = {'and': 0, 'box_seq': 0, 'box_choice': 0, 'box_star': 0, 'dia_seq': 0,
              'dia_test': 0, 'or': 1, 'dia_choice': 1, 'dia_star': 1,
              'box_test': 1, 'acut': 2}


class ContextViolation(ValueError):
    pass


class Unclassifiable(ValueError):
    pass


class AnnotatedSequent(NamedTuple):
    unfocused: frozenset = frozenset()
    focused: Optional[Formula] = None

    def formulas(self):
        """Underlying formula set (annotations forgotten)."""
        if self.focused is None:
            return self.unfocused
        return self.unfocused | {self.focused}

    def entries(self):
        out = [(f, 'u') for f in self.unfocused]
        if self.focused is not None:
            out.append((self.focused, 'f'))
        return sorted(out, key=lambda e: (order_key(e[0]), e[1]))

    def is_empty(self):
        return not self.unfocused and self.focused is None

    def contains(self, other):
        """Componentwise inclusion of annotated formula sets."""
        return (self.unfocused >= other.unfocused
                and (other.focused is None or self.focused == other.focused))

    def __str__(self):
        return ', '.join(to_str(f) + ('^f' if a == 'f' else '') for f, a in self.entries())


class SplitSequent(NamedTuple):
    left: AnnotatedSequent = AnnotatedSequent()
    right: AnnotatedSequent = AnnotatedSequent()

    def component(self, side):
        return self.left if side == LEFT else self.right

    def replace(self, side, comp):
        return SplitSequent(comp, self.right) if side == LEFT else SplitSequent(self.left, comp)

    def focus_side(self):
        if self.left.focused is not None:
            return LEFT
        if self.right.focused is not None:
            return RIGHT
        return None

    def focused(self):
        side = self.focus_side()
        return None if side is None else self.component(side).focused

    def swap(self):
        return SplitSequent(self.right, self.left)

    def __str__(self):
        return '%s || %s' % (self.left, self.right)


def component(formulas=(), focused=None):
    return AnnotatedSequent(frozenset(formulas), focused)


def split(left=(), right=(), focus=None, side=LEFT):
    """Convenience constructor; ``focus`` is placed on ``side``."""
    l = component(left, focus if side == LEFT else None)
    r = component(right, focus if side == RIGHT else None)
    return SplitSequent(l, r)


def other(side):
    return RIGHT if side == LEFT else LEFT


class RuleInstance(NamedTuple):
    rule: str
    side: str
    principal: Optional[Formula]
    annotation: Optional[str]
    conclusion: SplitSequent
    premises: tuple
    # For ax1: (side, formula, annotation) of the complementary formula.
    partner: Optional[tuple] = None

    def __str__(self):
        p = '' if self.principal is None else ' %s^%s' % (to_str(self.principal), self.annotation or '')
        return '%s[%s]%s' % (self.rule, self.side, p)


class Context(NamedTuple):
    """Per-component closure sets of the root sequent."""

    left: frozenset
    right: frozenset

    def component(self, side):
        return self.left if side == LEFT else self.right


def root_context(sigma):
    return Context(fl_closure_neg(sigma.left.formulas()),
                   fl_closure_neg(sigma.right.formulas()))


def check_context(sigma, ctx):
    for side in SIDES:
        extra = sigma.component(side).formulas() - ctx.component(side)
        if extra:
            raise ContextViolation('%s component leaves the closure: %s' % (
                side, ', '.join(sorted(map(to_str, extra)))))


# -- per-component helpers -----------------------------------------------------

_fl_cache = {}


def component_closure(comp):
    """FL-closure with negations of one component (used by acut and modal)."""
    key = comp.formulas()
    r = _fl_cache.get(key)
    if r is None:
        r = fl_closure_neg(key)
        if len(_fl_cache) > 200000:
            _fl_cache.clear()
        _fl_cache[key] = r
    return r


def rule_name(f):
    """Name of the principal-formula rule decomposing ``f`` (None if none)."""
    t = type(f)
    if t is And:
        return 'and'
    if t is Or:
        return 'or'
    if t is Dia or t is Box:
        pre = 'dia_' if t is Dia else 'box_'
        ta = type(f.prog)
        if ta is Seq:
            return pre + 'seq'
        if ta is Choice:
            return pre + 'choice'
        if ta is Star:
            return pre + 'star'
        if ta is Test:
            return pre + 'test'
    return None


def expand(f):
    """Premise shapes of the principal rule for ``f``.

    Each premise is ``(unfocused_additions, carried)``: ``carried`` is the
    formula that inherits the principal's annotation (diamond rules only).
    """
    t = type(f)
    if t is And:
        return (((f.left, f.right), None),)
    if t is Or:
        return (((f.left,), None), ((f.right,), None))
    a, chi = f.prog, f.body
    ta = type(a)
    if t is Dia:
        if ta is Seq:
            return (((), Dia(a.first, Dia(a.second, chi))),)
        if ta is Choice:
            return (((), Dia(a.left, chi)), ((), Dia(a.right, chi)))
        if ta is Star:
            return (((), Dia(a.body, f)), ((), chi))
        if ta is Test:
            return (((a.formula,), chi),)
    else:
        if ta is Seq:
            return (((Box(a.first, Box(a.second, chi)),), None),)
        if ta is Choice:
            return (((Box(a.left, chi), Box(a.right, chi)), None),)
        if ta is Star:
            return (((Box(a.body, f), chi), None),)
        if ta is Test:
            return (((negate(a.formula),), None), ((chi,), None))
    raise ValueError('no principal rule for %s' % to_str(f))


def _apply_unfocused(comp, f, keep):
    base = comp.unfocused if keep else comp.unfocused - {f}
    out = []
    for adds, carried in expand(f):
        s = set(base)
        s.update(adds)
        if carried is not None:
            s.add(carried)
        out.append(AnnotatedSequent(frozenset(s), comp.focused))
    return out


def _apply_focused(comp):
    f = comp.focused
    out = []
    for adds, carried in expand(f):
        out.append(AnnotatedSequent(comp.unfocused | frozenset(adds), carried))
    return out


def _cp_candidates(comp):
    """Cumulative and productive instances with an unfocused principal in one
    component, as ``(rule, principal, premise_components)``."""
    res = []
    u = comp.unfocused
    for f in u:
        name = rule_name(f)
        if name is None:
            continue
        prems = _apply_unfocused(comp, f, keep=True)
        if all(p.unfocused != u for p in prems):
            res.append((name, f, prems))
    return res


def _cut_candidates(comp):
    u = comp.unfocused
    seen = set()
    res = []
    for g in component_closure(comp):
        if g in seen:
            continue
        ng = negate(g)
        seen.add(g)
        seen.add(ng)
        if g in u or ng in u:
            continue
        pos, neg = (g, ng) if order_key(g) <= order_key(ng) else (ng, g)
        res.append(pos)
    return res


_choice_cache = {}


def saturation_step(comp):
    """The preferred cumulative-productive instance on a component, or None.

    Depends on the component alone, so equal components always get the same
    rule with the same principal formula.  Returns ``(rule, principal,
    premise_components)``; for ``acut`` the principal is the cut formula.
    """
    if comp in _choice_cache:
        return _choice_cache[comp]
    best = None
    cands = _cp_candidates(comp)
    if cands:
        best = min(cands, key=lambda c: (_RULE_RANK[c[0]], order_key(c[1])))
    else:
        cuts = _cut_candidates(comp)
        if cuts:
            g = min(cuts, key=order_key)
            best = ('acut', g, [AnnotatedSequent(comp.unfocused | {g}, comp.focused),
                                AnnotatedSequent(comp.unfocused | {negate(g)}, comp.focused)])
    if len(_choice_cache) > 200000:
        _choice_cache.clear()
    _choice_cache[comp] = best
    return best


def clear_caches():
    _choice_cache.clear()
    _fl_cache.clear()


def is_saturated(comp, ctx=None):
    """No axiom and no cumulative-productive rule applies to the unfocused
    version of ``comp`` (cuts range over its own closure)."""
    if isinstance(comp, (set, frozenset, list, tuple)) and not isinstance(comp, AnnotatedSequent):
        comp = component(comp)
    plain = AnnotatedSequent(comp.formulas(), None)
    if _axioms(SplitSequent(plain, AnnotatedSequent())):
        return False
    return saturation_step(plain) is None


# -- axioms ------------------------------------------------------------------

def _axioms(sigma):
    """Axiom instances, ordered: single-component before cross-component."""
    out = []
    entries = []
    for side in SIDES:
        comp = sigma.component(side)
        if BOT in comp.unfocused:
            out.append(RuleInstance('ax2', side, BOT, 'u', sigma, ()))
        entries.extend((side, f, a) for f, a in comp.entries())
    pairs = []
    for i, (side, f, a) in enumerate(entries):
        nf = negate(f)
        for side2, g, a2 in entries[i + 1:]:
            if g is nf:
                pairs.append((side != side2, order_key(f), side, f, a, side2, g, a2))
    pairs.sort(key=lambda p: p[:2])
    for _, _, side, f, a, side2, g, a2 in pairs:
        out.append(RuleInstance('ax1', side, f, a, sigma, (), (side2, g, a2)))
    return out


# -- modal rule ----------------------------------------------------------------

def modal_premise(sigma, side):
    """Premise of the modal rule on the focused ``<a>phi`` in component ``side``.

    Uses the maximal split of each component: every ``[a]``-box contributes its
    body, and every unfocused formula ``chi`` contributes ``<a^>chi`` when that
    formula lies in the closure of its own component.
    """
    comp = sigma.component(side)
    f = comp.focused
    a = f.prog
    back = converse(a)
    parts = {}
    for d in SIDES:
        c = sigma.component(d)
        ctx = component_closure(c)
        bodies = {g.body for g in c.unfocused if type(g) is Box and g.prog is a}
        for chi in c.unfocused:
            h = Dia(back, chi)
            if h in ctx:
                bodies.add(h)
        parts[d] = AnnotatedSequent(frozenset(bodies), f.body if d == side else None)
    return SplitSequent(parts[LEFT], parts[RIGHT])


def is_modal_focus(f):
    return f is not None and type(f) is Dia and type(f.prog) is Atom


# -- enumeration --------------------------------------------------------------

def enumerate_instances(sigma, ctx=None, include_weak=True, principal=None):
    """All rule instances applicable to ``sigma`` (up to the modal split).

    ``ctx`` is the root :class:`Context`; a :class:`ContextViolation` is raised
    if ``sigma`` mentions formulas outside it.  Weakening premises are
    restricted to ``ctx`` automatically since they only remove formulas.
    Passing ``principal`` restricts the result to instances on that formula
    (the cut formula, for ``acut``).
    """
    if ctx is not None:
        check_context(sigma, ctx)
    out = list(_axioms(sigma))
    fside = sigma.focus_side()
    for side in SIDES:
        comp = sigma.component(side)
        # principal rules on unfocused formulas, consuming and cumulative forms
        for f in sorted(comp.unfocused, key=order_key):
            if principal is not None and f is not principal:
                continue
            name = rule_name(f)
            if name is not None:
                for keep in (False, True):
                    prems = _apply_unfocused(comp, f, keep)
                    out.append(RuleInstance(name, side, f, 'u', sigma,
                                            tuple(sigma.replace(side, p) for p in prems)))
            if include_weak:
                out.append(RuleInstance('weak', side, f, 'u', sigma,
                                        (sigma.replace(side, AnnotatedSequent(comp.unfocused - {f}, comp.focused)),)))
            if fside is None:
                for keep in (False, True):
                    base = comp.unfocused if keep else comp.unfocused - {f}
                    out.append(RuleInstance('f', side, f, 'u', sigma,
                                            (sigma.replace(side, AnnotatedSequent(base, f)),)))
        # focused principal: diamond rules, modal rule and u
        g = comp.focused
        if g is not None:
            if type(g) is Dia and type(g.prog) is not Atom:
                prems = _apply_focused(comp)
                out.append(RuleInstance(rule_name(g), side, g, 'f', sigma,
                                        tuple(sigma.replace(side, p) for p in prems)))
            if is_modal_focus(g):
                out.append(RuleInstance('modal', side, g, 'f', sigma, (modal_premise(sigma, side),)))
            out.append(RuleInstance('u', side, g, 'f', sigma,
                                    (sigma.replace(side, AnnotatedSequent(comp.unfocused | {g}, None)),)))
        # analytic cuts over the component's own closure
        cuts = component_closure(comp)
        if principal is not None:
            cuts = [principal] if principal in cuts else []
        for h in sorted(cuts, key=order_key):
            out.append(RuleInstance('acut', side, h, None, sigma, (
                sigma.replace(side, AnnotatedSequent(comp.unfocused | {h}, comp.focused)),
                sigma.replace(side, AnnotatedSequent(comp.unfocused | {negate(h)}, comp.focused)))))
    return out


def validate_instance(inst):
    """Recompute the premises of ``inst`` from its rule, principal and
    conclusion; returns True when they match exactly."""
    for cand in enumerate_instances(inst.conclusion, principal=inst.principal):
        if (cand.rule == inst.rule and cand.side == inst.side
                and cand.principal == inst.principal
                and cand.annotation == inst.annotation
                and cand.premises == inst.premises):
            return True
    return False


# -- classification -------------------------------------------------------------

def is_cumulative(inst):
    c = inst.conclusion
    return all(p.left.contains(c.left) and p.right.contains(c.right) for p in inst.premises)


def is_productive(inst):
    return all(p != inst.conclusion for p in inst.premises)


def classify(inst):
    conceding = inst.rule == 'u' and type(inst.principal) is Dia
    return {
        'cumulative': is_cumulative(inst),
        'productive': is_productive(inst),
        'conceding': conceding,
        'unblocking': inst.rule == 'u' and not conceding,
    }


def priority_class(inst, sigma=None):
    """Prover's preference class (1 best .. 6) of an instance."""
    sigma = inst.conclusion if sigma is None else sigma
    rule = inst.rule
    if rule in ('ax1', 'ax2'):
        return 1
    c = classify(inst)
    fside = sigma.focus_side()
    if rule in SATURATION_RULES and c['cumulative'] and c['productive']:
        if rule == 'acut' or inst.annotation == 'u':
            if fside != inst.side:
                return 2
            return 4
    if c['unblocking']:
        return 3
    if rule in DIAMOND_RULES and inst.annotation == 'f' and c['productive']:
        return 5
    if rule == 'modal' or c['conceding'] or (rule == 'f' and c['cumulative']):
        return 6
    raise Unclassifiable('%s fits no priority class' % (inst,))


# -- the pruned move set used by proof search ----------------------------------

def prover_moves(sigma):
    """Instances Prover may pick at ``sigma``: ``(class, [instances])``.

    Classes 1-5 yield a single canonical instance; class 6 keeps every modal,
    cumulative focus (on diamond formulas) and conceding unfocus option.  An
    empty list means Prover is stuck.
    """
    ax = _axioms(sigma)
    if ax:
        return 1, [ax[0]]
    fside = sigma.focus_side()
    for side in SIDES:
        if side == fside:
            continue
        step = saturation_step(sigma.component(side))
        if step is not None:
            return 2, [_from_step(sigma, side, step)]
    if fside is None:
        out = []
        for side in SIDES:
            comp = sigma.component(side)
            for f in sorted(comp.unfocused, key=order_key):
                if type(f) is Dia:
                    out.append(RuleInstance('f', side, f, 'u', sigma,
                                            (sigma.replace(side, AnnotatedSequent(comp.unfocused, f)),)))
        return 6, out
    comp = sigma.component(fside)
    g = comp.focused
    if type(g) is not Dia:
        return 3, [RuleInstance('u', fside, g, 'f', sigma,
                                (sigma.replace(fside, AnnotatedSequent(comp.unfocused | {g}, None)),))]
    step = saturation_step(comp)
    if step is not None:
        return 4, [_from_step(sigma, fside, step)]
    if type(g.prog) is not Atom:
        prems = _apply_focused(comp)
        return 5, [RuleInstance(rule_name(g), fside, g, 'f', sigma,
                                tuple(sigma.replace(fside, p) for p in prems))]
    return 6, [
        RuleInstance('modal', fside, g, 'f', sigma, (modal_premise(sigma, fside),)),
        RuleInstance('u', fside, g, 'f', sigma,
                     (sigma.replace(fside, AnnotatedSequent(comp.unfocused | {g}, None)),)),
    ]


def _from_step(sigma, side, step):
    rule, principal, prems = step
    ann = None if rule == 'acut' else 'u'
    return RuleInstance(rule, side, principal, ann, sigma,
                        tuple(sigma.replace(side, p) for p in prems))


def instance_key(inst):
    """What identifies an instance inside a proof node."""
    return (inst.rule, inst.side, inst.principal, inst.annotation)
