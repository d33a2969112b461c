"""Interpolants extracted from cyclic proofs, and a Beth definition.

Each interpolant is re-verified by two further calls to the prover; the
printed report shows the outcome of those checks.
"""

from cpdl.interpolation import beth_definition, interpolate
from cpdl.syntax import parse, to_str

PAIRS = [
    ('p & q', 'p | r'),
    ('[a*]p', '[a*][a*]p'),
    ('[a*](p -> [a]p) & p', '[a*]p'),
    ('<a>(p & q) & [b]r', '<a>p | <b>~r'),
]

for a, b in PAIRS:
    res = interpolate(parse(a), parse(b))
    print('%-28s |= %-20s theta = %s  (verified: %s)'
          % (a, b, to_str(res.theta), res.report.ok))

# p is implicitly defined by (p <-> [a]q); recover the explicit definition.
res = beth_definition(parse('(p -> [a]q) & ([a]q -> p)'), 'p')
print('definition of p:', to_str(res.theta))
