"""Formulas and programs of converse PDL.

Expressions are hash-consed: building the same tree twice yields the same
object, so ``==`` is identity and hashing is cheap.  Formulas are always in
negation normal form; ``~`` in the surface syntax is eliminated by
:func:`negate` at parse time.
"""

import re
from dataclasses import dataclass

__all__ = [
    'Formula', 'Program', 'Top', 'Bot', 'Prop', 'NegProp', 'And', 'Or', 'Dia',
    'Box', 'Atom', 'Seq', 'Choice', 'Star', 'Test', 'TOP', 'BOT', 'Vocabulary',
    'ParseError', 'parse', 'parse_program', 'to_str', 'negate', 'converse',
    'substitute', 'vocabulary', 'trace_successors', 'fl_closure',
    'fl_closure_neg', 'order_key', 'size', 'conj', 'disj', 'is_fixpoint',
]

_interned = {}


class Expr:
    """Base class of interned syntax trees."""

    __slots__ = ('args', '_neg', '_succ', '_fl', '_str', '_key', '__weakref__')

    def __new__(cls, *args):
        key = (cls, args)
        obj = _interned.get(key)
        if obj is None:
            obj = object.__new__(cls)
            obj.args = args
            obj._neg = obj._succ = obj._fl = obj._str = obj._key = None
            obj = _interned.setdefault(key, obj)
        return obj

    def __reduce__(self):
        return (type(self), self.args)

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __repr__(self):
        return '%s(%r)' % (type(self).__name__, to_str(self))

    def __str__(self):
        return to_str(self)

    def __lt__(self, other):
        return order_key(self) < order_key(other)


class Formula(Expr):
    __slots__ = ()


class Program(Expr):
    __slots__ = ()


class Top(Formula):
    __slots__ = ()


class Bot(Formula):
    __slots__ = ()


class Prop(Formula):
    __slots__ = ()

    @property
    def name(self):
        return self.args[0]


class NegProp(Formula):
    __slots__ = ()

    @property
    def name(self):
        return self.args[0]


class _Binary(Formula):
    __slots__ = ()

    @property
    def left(self):
        return self.args[0]

    @property
    def right(self):
        return self.args[1]


class And(_Binary):
    __slots__ = ()


class Or(_Binary):
    __slots__ = ()


class _Modal(Formula):
    __slots__ = ()

    @property
    def prog(self):
        return self.args[0]

    @property
    def body(self):
        return self.args[1]


class Dia(_Modal):
    __slots__ = ()


class Box(_Modal):
    __slots__ = ()


class Atom(Program):
    """Atomic action; ``inverse=True`` is the paired converse action."""

    __slots__ = ()

    def __new__(cls, name, inverse=False):
        return Expr.__new__(cls, name, bool(inverse))

    @property
    def name(self):
        return self.args[0]

    @property
    def inverse(self):
        return self.args[1]


class Seq(Program):
    __slots__ = ()

    @property
    def first(self):
        return self.args[0]

    @property
    def second(self):
        return self.args[1]


class Choice(Program):
    __slots__ = ()

    @property
    def left(self):
        return self.args[0]

    @property
    def right(self):
        return self.args[1]


class Star(Program):
    __slots__ = ()

    @property
    def body(self):
        return self.args[0]


class Test(Program):
    __slots__ = ()
    __test__ = False    # keep pytest from collecting this class

    @property
    def formula(self):
        return self.args[0]


TOP = Top()
BOT = Bot()


def conj(items):
    """Right-nested conjunction; the empty conjunction is ``true``."""
    items = list(items)
    if not items:
        return TOP
    out = items[-1]
    for f in reversed(items[:-1]):
        out = And(f, out)
    return out


def disj(items):
    items = list(items)
    if not items:
        return BOT
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Or(f, out)
    return out


def is_fixpoint(f):
    return isinstance(f, (Dia, Box)) and isinstance(f.prog, Star)


# -- involutions -------------------------------------------------------------

def negate(f):
    """The negation-normal-form negation of a formula (an involution)."""
    if f._neg is not None:
        return f._neg
    t = type(f)
    if t is Top:
        g = BOT
    elif t is Bot:
        g = TOP
    elif t is Prop:
        g = NegProp(f.name)
    elif t is NegProp:
        g = Prop(f.name)
    elif t is And:
        g = Or(negate(f.left), negate(f.right))
    elif t is Or:
        g = And(negate(f.left), negate(f.right))
    elif t is Dia:
        g = Box(f.prog, negate(f.body))
    elif t is Box:
        g = Dia(f.prog, negate(f.body))
    else:
        raise TypeError('not a formula: %r' % (f,))
    f._neg = g
    g._neg = f
    return g


def converse(alpha):
    t = type(alpha)
    if t is Atom:
        return Atom(alpha.name, not alpha.inverse)
    if t is Seq:
        return Seq(converse(alpha.second), converse(alpha.first))
    if t is Choice:
        return Choice(converse(alpha.left), converse(alpha.right))
    if t is Star:
        return Star(converse(alpha.body))
    if t is Test:
        return alpha
    raise TypeError('not a program: %r' % (alpha,))


def substitute(f, p, g):
    """Replace proposition ``p`` by ``g`` and its negation by ``negate(g)``."""
    if isinstance(p, Prop):
        p = p.name
    memo = {}
    ng = negate(g)

    def sub(e):
        if e in memo:
            return memo[e]
        t = type(e)
        if t is Prop:
            r = g if e.name == p else e
        elif t is NegProp:
            r = ng if e.name == p else e
        elif t in (Top, Bot):
            r = e
        elif t is Atom:
            r = e
        elif t is Test:
            r = Test(sub(e.formula))
        else:
            r = t(*(sub(a) for a in e.args))
        memo[e] = r
        return r

    return sub(f)


# -- vocabulary ---------------------------------------------------------------

@dataclass(frozen=True)
class Vocabulary:
    props: frozenset = frozenset()
    actions: frozenset = frozenset()

    def __or__(self, other):
        return Vocabulary(self.props | other.props, self.actions | other.actions)

    def __and__(self, other):
        return Vocabulary(self.props & other.props, self.actions & other.actions)

    def __le__(self, other):
        return self.props <= other.props and self.actions <= other.actions

    def __sub__(self, other):
        return Vocabulary(self.props - other.props, self.actions - other.actions)

    def is_empty(self):
        return not self.props and not self.actions


def vocabulary(*exprs):
    """Propositions and action base names occurring in the given expressions.

    An action and its converse count as the same entry.
    """
    props, actions = set(), set()
    seen = set()
    stack = list(exprs)
    while stack:
        e = stack.pop()
        if isinstance(e, (set, frozenset, list, tuple)):
            stack.extend(e)
            continue
        if e in seen:
            continue
        seen.add(e)
        t = type(e)
        if t is Prop or t is NegProp:
            props.add(e.name)
        elif t is Atom:
            actions.add(e.name)
        elif t is Top or t is Bot:
            pass
        else:
            stack.extend(e.args)
    return Vocabulary(frozenset(props), frozenset(actions))


# -- size and ordering --------------------------------------------------------

def size(e):
    """Length measure: atoms count one, ``|<a>f| = |a| + |f|``."""
    t = type(e)
    if t in (Top, Bot, Prop, NegProp, Atom):
        return 1
    if t in (And, Or, Seq, Choice):
        return 1 + size(e.args[0]) + size(e.args[1])
    if t in (Dia, Box):
        return size(e.prog) + size(e.body)
    if t is Star:
        return 1 + size(e.body)
    if t is Test:
        return 1 + size(e.formula)
    raise TypeError(e)


def order_key(e):
    """Global total order on expressions: by size, then by printed form."""
    if e._key is None:
        e._key = (size(e), to_str(e))
    return e._key


# -- traces and Fischer-Ladner closure ----------------------------------------

def trace_successors(f):
    """The formulas ``g`` with ``f ->_C g`` (immediate trace successors)."""
    if f._succ is not None:
        return f._succ
    t = type(f)
    if t is And or t is Or:
        out = (f.left, f.right)
    elif t is Dia or t is Box:
        a, chi = f.prog, f.body
        ta = type(a)
        if ta is Atom:
            out = (chi,)
        elif ta is Seq:
            out = (t(a.first, t(a.second, chi)),)
        elif ta is Choice:
            out = (t(a.left, chi), t(a.right, chi))
        elif ta is Test:
            tau = a.formula if t is Dia else negate(a.formula)
            out = (tau, chi)
        else:
            out = (t(a.body, f), chi)
    else:
        out = ()
    f._succ = frozenset(out)
    return f._succ


def _fl_single(f):
    if f._fl is None:
        seen = {f}
        work = [f]
        while work:
            g = work.pop()
            for h in trace_successors(g):
                if h not in seen:
                    seen.add(h)
                    work.append(h)
        f._fl = frozenset(seen)
    return f._fl


def fl_closure(gamma):
    """Fischer-Ladner closure: least superset closed under trace successors."""
    if isinstance(gamma, Formula):
        return _fl_single(gamma)
    out = set()
    for f in gamma:
        out |= _fl_single(f)
    return frozenset(out)


def fl_closure_neg(gamma):
    if isinstance(gamma, Formula):
        gamma = (gamma,)
    out = set()
    for f in gamma:
        out |= _fl_single(f)
        out |= _fl_single(negate(f))
    return frozenset(out)


# -- printing -----------------------------------------------------------------

def to_str(e):
    if e._str is None:
        e._str = _fmt(e, 0)
    return e._str


def _fmt(e, prec):
    t = type(e)
    if t is Top:
        return 'true'
    if t is Bot:
        return 'false'
    if t is Prop:
        return e.name
    if t is NegProp:
        return '~' + e.name
    if t is Or:
        s = '%s | %s' % (_fmt(e.left, 1), _fmt(e.right, 2))
        return '(%s)' % s if prec > 1 else s
    if t is And:
        s = '%s & %s' % (_fmt(e.left, 2), _fmt(e.right, 3))
        return '(%s)' % s if prec > 2 else s
    if t is Dia:
        return '<%s>%s' % (_pfmt(e.prog, 0), _fmt(e.body, 3))
    if t is Box:
        return '[%s]%s' % (_pfmt(e.prog, 0), _fmt(e.body, 3))
    return _pfmt(e, prec)


def _pfmt(a, prec):
    t = type(a)
    if t is Atom:
        return a.name + ('^' if a.inverse else '')
    if t is Choice:
        s = '%s + %s' % (_pfmt(a.left, 1), _pfmt(a.right, 2))
        return '(%s)' % s if prec > 1 else s
    if t is Seq:
        s = '%s;%s' % (_pfmt(a.first, 2), _pfmt(a.second, 3))
        return '(%s)' % s if prec > 2 else s
    if t is Star:
        return _pfmt(a.body, 3) + '*'
    if t is Test:
        f = a.formula
        inner = _fmt(f, 3)
        if type(f) in (And, Or):
            return inner + '?'
        return inner + '?'
    raise TypeError(a)


# -- parsing ------------------------------------------------------------------

class ParseError(SyntaxError):
    """Malformed formula text; ``offset`` is the byte offset of the problem."""

    def __init__(self, msg, text, offset):
        super().__init__('%s at offset %d' % (msg, offset))
        self.text = text
        self.offset = offset


_TOKEN = re.compile(r'\s*(?:(->)|([<>\[\]()~&|+;*^?])|([a-z][a-zA-Z0-9_]*))')
_KEYWORDS = {'true', 'false'}


def _tokenize(text):
    toks = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError('unexpected character %r' % text[pos], text, _byte(text, pos))
        start = m.start(m.lastindex)
        toks.append((m.group(m.lastindex), start))
        pos = m.end()
    toks.append(('$', n))
    return toks


def _byte(text, pos):
    return len(text[:pos].encode('utf-8'))


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.test_memo = {}

    def peek(self):
        return self.toks[self.i][0]

    def error(self, msg):
        pos = self.toks[self.i][1]
        raise ParseError(msg, self.text, _byte(self.text, pos))

    def expect(self, tok):
        if self.peek() != tok:
            self.error('expected %r, found %r' % (tok, self.peek()))
        self.i += 1

    def is_ident(self):
        tok = self.peek()
        return bool(tok) and tok[0].isalpha() and tok not in _KEYWORDS

    def formula(self):
        lhs = self.disj()
        if self.peek() == '->':
            self.i += 1
            return Or(negate(lhs), self.formula())
        return lhs

    def disj(self):
        f = self.conj()
        while self.peek() == '|':
            self.i += 1
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek() == '&':
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self):
        tok = self.peek()
        if tok == '~':
            self.i += 1
            return negate(self.unary())
        if tok == '<':
            self.i += 1
            a = self.prog()
            self.expect('>')
            return Dia(a, self.unary())
        if tok == '[':
            self.i += 1
            a = self.prog()
            self.expect(']')
            return Box(a, self.unary())
        if tok == 'true':
            self.i += 1
            return TOP
        if tok == 'false':
            self.i += 1
            return BOT
        if tok == '(':
            self.i += 1
            f = self.formula()
            self.expect(')')
            return f
        if self.is_ident():
            self.i += 1
            return Prop(tok)
        self.error('expected a formula, found %r' % tok)

    def prog(self):
        a = self.seq()
        while self.peek() == '+':
            self.i += 1
            a = Choice(a, self.seq())
        return a

    def seq(self):
        a = self.star()
        while self.peek() == ';':
            self.i += 1
            a = Seq(a, self.star())
        return a

    def star(self):
        a = self.atomp()
        while self.peek() == '*':
            self.i += 1
            a = Star(a)
        return a

    def atomp(self):
        test = self.try_test()
        if test is not None:
            return test
        tok = self.peek()
        if tok == '(':
            self.i += 1
            a = self.prog()
            self.expect(')')
            return a
        if self.is_ident():
            self.i += 1
            if self.peek() == '^':
                self.i += 1
                return Atom(tok, True)
            return Atom(tok)
        self.error('expected a program, found %r' % tok)

    def try_test(self):
        start = self.i
        if start in self.test_memo:
            res, end = self.test_memo[start]
            if res is not None:
                self.i = end
            return res
        res = None
        try:
            f = self.formula()
            if self.peek() == '?':
                self.i += 1
                res = Test(f)
        except ParseError:
            pass
        end = self.i
        self.test_memo[start] = (res, end)
        if res is None:
            self.i = start
        return res


def parse(text):
    """Parse the surface syntax into a negation-normal-form formula."""
    p = _Parser(text)
    f = p.formula()
    if p.peek() != '$':
        p.error('unexpected trailing input %r' % p.peek())
    return f


def parse_program(text):
    p = _Parser(text)
    a = p.prog()
    if p.peek() != '$':
        p.error('unexpected trailing input %r' % p.peek())
    return a
