"""Command-line front end.

Exit codes: 0 the answer was produced (and the property holds), 1 the
property fails, 2 usage or parse error, 3 resource limit.
"""

import argparse
import json
import sys

from .calculus import split
from .interpolation import (NotImplicit, NotValid, beth_definition,
                            interpolate)
from .prover import (ResourceLimit, check_proof, decide, proof_from_json,
                     proof_to_dot, proof_to_json, sequent_from_strings)
from .semantics import load_model, mc_compositional, mc_game
from .syntax import (ParseError, fl_closure_neg, negate, parse, size, to_str,
                     vocabulary)

OK, FAILS, USAGE, LIMIT = 0, 1, 2, 3


class _Usage(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def _common(p):
    p.add_argument('--json', action='store_true', help='machine-readable output')
    p.add_argument('--emit-proof', metavar='PATH', help='write the proof as JSON')
    p.add_argument('--emit-model', metavar='PATH', help='write the countermodel as JSON')
    p.add_argument('--emit-dot', metavar='PATH', help='write the proof as Graphviz DOT')
    p.add_argument('--uniform-audit', action='store_true',
                   help='also audit uniformity when checking proofs')
    p.add_argument('--max-positions', type=int, default=2_000_000, metavar='N')
    p.add_argument('--timeout', type=float, default=120.0, metavar='SECS')
    p.add_argument('--simplify', action=argparse.BooleanOptionalAction, default=True,
                   help='simplify interpolants before verification')


def build_parser():
    top = _ArgParser(prog='cpdl', description='Decision procedure, proofs and '
                     'interpolants for PDL with converse.')
    sub = top.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True
    p = sub.add_parser('parse', help='normalise a formula and show its statistics')
    p.add_argument('formula')
    p = sub.add_parser('mc', help='model check a formula at a state')
    p.add_argument('model')
    p.add_argument('state')
    p.add_argument('formula')
    p.add_argument('--method', choices=('game', 'compositional'), default='game')
    p = sub.add_parser('sat', help='satisfiability of a formula')
    p.add_argument('formula')
    p = sub.add_parser('valid', help='validity of a formula')
    p.add_argument('formula')
    p = sub.add_parser('prove', help='unsatisfiability of a split sequent LEFT -- RIGHT')
    p.add_argument('left', nargs='*')
    p = sub.add_parser('check-proof', help='check a proof file against LEFT -- RIGHT')
    p.add_argument('proof')
    p.add_argument('left', nargs='*')
    p = sub.add_parser('interpolate', help='Craig interpolant for PHI |= PSI')
    p.add_argument('phi')
    p.add_argument('psi')
    p = sub.add_parser('beth', help='explicit definition of P from an implicit one')
    p.add_argument('phi')
    p.add_argument('p')
    for p in sub.choices.values():
        _common(p)
    return top


_VALUED = {'--emit-proof', '--emit-model', '--emit-dot', '--max-positions', '--timeout'}


def _split_argv(argv):
    """Separate right-hand formulas after ``--``; options there are kept."""
    if '--' not in argv:
        return argv, None
    i = argv.index('--')
    head, tail, right = argv[:i], argv[i + 1:], []
    j = 0
    while j < len(tail):
        tok = tail[j]
        if tok.startswith('--'):
            head.append(tok)
            if tok in _VALUED and j + 1 < len(tail):
                head.append(tail[j + 1])
                j += 1
        else:
            right.append(tok)
        j += 1
    return head, right


class _Out:
    def __init__(self, args, stream):
        self.args = args
        self.stream = stream
        self.data = {'command': args.command}
        self.lines = []

    def put(self, key, value, text=None):
        self.data[key] = value
        if text is not None:
            self.lines.append(text)

    def flush(self):
        if self.args.json:
            json.dump(self.data, self.stream, indent=1)
            self.stream.write('\n')
        else:
            for line in self.lines:
                self.stream.write(line + '\n')


def _write(path, text):
    with open(path, 'w') as fh:
        fh.write(text)


def _emit_proof(args, out, proof):
    if args.emit_proof:
        _write(args.emit_proof, json.dumps(proof_to_json(proof), indent=1))
        out.put('proof_file', args.emit_proof)
    if args.emit_dot:
        _write(args.emit_dot, proof_to_dot(proof))
        out.put('dot_file', args.emit_dot)


def _emit_model(args, out, cm):
    obj = cm.model.to_json()
    obj['witness'] = cm.witness
    out.put('countermodel', obj, 'model: %s' % json.dumps(obj))
    if args.emit_model:
        _write(args.emit_model, json.dumps(obj, indent=1))
        out.put('model_file', args.emit_model)


def _limits(args):
    if args.max_positions <= 0 or args.timeout <= 0:
        raise _Usage('budgets must be positive')
    return {'max_positions': args.max_positions, 'timeout': args.timeout}


def _decide(args, out, seq, proof_word, sat_word, proof_code):
    res = decide(seq, uniform=True, **_limits(args))
    out.put('game_size', res.game_size)
    if res.is_proof:
        out.put('answer', proof_word, proof_word)
        out.put('proof_nodes', len(res.proof))
        _emit_proof(args, out, res.proof)
        return proof_code
    out.put('answer', sat_word, sat_word)
    _emit_model(args, out, res.countermodel)
    return FAILS if proof_code == OK else OK


def _cmd_parse(args, out):
    f = parse(args.formula)
    voc = vocabulary(f)
    out.put('formula', to_str(f), to_str(f))
    out.put('size', size(f), 'size: %d' % size(f))
    out.put('closure_size', len(fl_closure_neg(f)), 'closure: %d' % len(fl_closure_neg(f)))
    out.put('vocabulary', {'props': sorted(voc.props), 'actions': sorted(voc.actions)},
            'vocabulary: props %s, actions %s' % (sorted(voc.props), sorted(voc.actions)))
    return OK


def _cmd_mc(args, out):
    m = load_model(args.model)
    if args.state not in m.states:
        raise _Usage('unknown state %r' % args.state)
    f = parse(args.formula)
    if args.method == 'game':
        holds = mc_game(m, args.state, f)
    else:
        holds = args.state in mc_compositional(m, f)
    out.put('holds', holds, 'true' if holds else 'false')
    return OK if holds else FAILS


def _cmd_sat(args, out):
    return _decide(args, out, split([parse(args.formula)]), 'unsat', 'sat', FAILS)


def _cmd_valid(args, out):
    return _decide(args, out, split([negate(parse(args.formula))]), 'valid', 'not valid', OK)


def _cmd_prove(args, out):
    right = args.right or []
    if not args.left and not right:
        raise _Usage('prove needs at least one formula')
    seq = sequent_from_strings(args.left, right)
    out.put('sequent', str(seq))
    return _decide(args, out, seq, 'unsat', 'sat', OK)


def _cmd_check_proof(args, out):
    with open(args.proof) as fh:
        proof = proof_from_json(json.load(fh))
    if args.left or args.right:
        seq = sequent_from_strings(args.left, args.right or [])
    else:
        seq = proof.nodes[proof.root].seq
    problems = check_proof(proof, seq, uniform=args.uniform_audit)
    out.put('sequent', str(seq))
    out.put('violations', [{'node': v.node, 'reason': v.reason} for v in problems])
    if problems:
        out.lines.append('rejected: %d violation(s)' % len(problems))
        out.lines.extend('  %s' % (v,) for v in problems)
        return FAILS
    out.lines.append('ok (%d nodes)' % len(proof))
    return OK


def _report(out, rep):
    out.put('verification', {'vocabulary': rep.vocabulary_ok, 'theta_entails_psi': rep.entails_psi,
                             'phi_entails_theta': rep.entailed_by_phi, 'errors': rep.errors},
            'verified: vocabulary %s, theta |= psi %s, phi |= theta %s' % (
                _yn(rep.vocabulary_ok), _yn(rep.entails_psi), _yn(rep.entailed_by_phi)))


def _yn(b):
    return 'ok' if b else 'FAILED'


def _cmd_interpolate(args, out):
    phi, psi = parse(args.phi), parse(args.psi)
    res = interpolate(phi, psi, simplify_result=args.simplify, **_limits(args))
    if isinstance(res, NotValid):
        out.put('answer', 'not valid', 'not valid')
        _emit_model(args, out, res.countermodel)
        return FAILS
    out.put('answer', 'valid', 'valid')
    out.put('interpolant', to_str(res.theta), 'interpolant: %s' % to_str(res.theta))
    _report(out, res.report)
    _emit_proof(args, out, res.proof)
    return OK


def _cmd_beth(args, out):
    phi = parse(args.phi)
    res = beth_definition(phi, args.p, simplify_result=args.simplify, **_limits(args))
    if isinstance(res, NotImplicit):
        out.put('answer', 'not implicit', 'not implicit')
        _emit_model(args, out, res.countermodel)
        return FAILS
    out.put('answer', 'definable', 'definable')
    out.put('definition', to_str(res.theta), 'definition: %s' % to_str(res.theta))
    _report(out, res.report)
    _emit_proof(args, out, res.proof)
    return OK


COMMANDS = {'parse': _cmd_parse, 'mc': _cmd_mc, 'sat': _cmd_sat, 'valid': _cmd_valid,
            'prove': _cmd_prove, 'check-proof': _cmd_check_proof,
            'interpolate': _cmd_interpolate, 'beth': _cmd_beth}


def run(argv, stdout=None, stderr=None):
    """Run one command; returns the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    head, tail = _split_argv(list(argv))
    try:
        args = build_parser().parse_args(head)
        if tail is not None and args.command not in ('prove', 'check-proof'):
            raise _Usage("'--' is only meaningful for prove and check-proof")
        args.right = tail
        if not hasattr(args, 'left'):
            args.left = []
        out = _Out(args, stdout)
        code = COMMANDS[args.command](args, out)
        out.flush()
        return code
    except _Usage as e:
        stderr.write('cpdl: %s\n' % e)
        return USAGE
    except ParseError as e:
        stderr.write('cpdl: parse error: %s\n' % e)
        return USAGE
    except (OSError, ValueError, KeyError) as e:
        stderr.write('cpdl: %s\n' % e)
        return USAGE
    except ResourceLimit as e:
        stderr.write('cpdl: resource limit: %s\n' % e)
        return LIMIT


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
