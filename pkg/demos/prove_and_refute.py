"""Decide a few sequents and show what comes back.

Valid implications produce a cyclic proof that the independent checker
accepts; invalid ones produce a finite Kripke model with a witness state.
"""

from cpdl.calculus import split
from cpdl.prover import check_proof, decide
from cpdl.semantics import mc_compositional
from cpdl.syntax import negate, parse, to_str

CASES = [
    ('[a*](p -> [a]p) & p', '[a*]p'),   # induction: needs a backlink
    ('p', '[a]<a^>p'),                  # converse
    ('<a*>p', '<a>p'),                  # not valid
]

for a, b in CASES:
    phi, psi = parse(a), parse(b)
    seq = split([phi, negate(psi)])
    res = decide(seq)
    print('%s  |=  %s' % (to_str(phi), to_str(psi)))
    if res.is_proof:
        pr = res.proof
        print('  valid: %d proof nodes, %d backlinks, checker: %s'
              % (len(pr), len(pr.backlinks), check_proof(pr, seq) or 'ok'))
    else:
        cm = res.countermodel
        truth_phi = cm.witness in mc_compositional(cm.model, phi)
        truth_psi = cm.witness in mc_compositional(cm.model, psi)
        print('  not valid: witness %s in a %d-state model (phi %s, psi %s)'
              % (cm.witness, len(cm.model.states), truth_phi, truth_psi))
