"""Command-line experiment runner.

Subcommands::

    splitadmm gen      write a synthetic problem (H.cmat, g.cmat, truth.cmat)
    splitadmm solve    run one solver, write solution/trace/ledger/metrics
    splitadmm comm     closed-form communication counts and efficiency verdicts
    splitadmm compare  run several solvers on one problem, emit JSON

Exit status: 0 on success, 2 for usage or parameter errors, 3 when the
iteration produced non-finite values.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .admm import IMAGING_PRESET, SolverConfig
from .cmat import read_cmat, read_cvec, write_cmat, write_cvec
from .comm import (CONVENTIONS, SENDER_ONCE, Method, efficiency_report,
                   format_percent, per_node_elements)
from .errors import NumericalError, SplitADMMError
from .problems import KINDS, SensingProblem, gen_problem
from .solvers import solve

SCHEMA_VERSION = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

DEFAULTS = dict(rho=1e5, lam=1e-2, scl=1.0, max_iters=50)


class UsageError(Exception):
    pass


def _int_list(text):
    """Parse ``'3'``, ``'1..20'`` or ``'2,4,8'`` into a list of ints."""
    try:
        if '..' in text:
            lo, hi = text.split('..')
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected an integer, a range a..b or a list a,b,c: {text!r}")


def _snr(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad SNR value {text!r}")


def _add_problem_args(p, required_seed=False):
    g = p.add_argument_group('problem')
    g.add_argument('--problem', metavar='DIR',
                   help="directory with H.cmat and g.cmat (truth.cmat optional)")
    g.add_argument('--nm', type=int, help="number of measurements N_m")
    g.add_argument('--np', dest='n_p', type=int, help="number of pixels N_p")
    g.add_argument('--k', type=int, help="nonzeros in the ground truth")
    g.add_argument('--snr', type=_snr, default=None,
                   help="SNR in dB ('inf' for noiseless, the default)")
    g.add_argument('--seed', type=int, required=required_seed)
    g.add_argument('--kind', choices=KINDS, default=None)


def _add_solver_args(p):
    g = p.add_argument_group('solver')
    g.add_argument('--preset', choices=['paper'],
                   help="full-size imaging settings: rho=1e5 lam=1e-2 "
                        "scl=1e-4 iters=50")
    g.add_argument('--rho', type=float)
    lam = g.add_mutually_exclusive_group()
    lam.add_argument('--lam', type=float, help="l1 weight")
    lam.add_argument('--lam-rel', type=float,
                     help="l1 weight as a fraction of max|H* g|")
    g.add_argument('--scl', type=float, help="joint scale of H and g")
    g.add_argument('--iters', type=int, help="iteration cap")
    g.add_argument('--eps-pri', type=float, default=0.0)
    g.add_argument('--eps-dual', type=float, default=0.0)
    g.add_argument('--threads', type=int, default=1)
    g.add_argument('--ragged', action='store_true',
                   help="allow divisions that do not split evenly")


def build_parser():
    parser = argparse.ArgumentParser(
        prog='splitadmm',
        description="Distributed ADMM for l1-regularized inverse problems")
    parser.add_argument('--version', action='version',
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('gen', help="generate a synthetic problem")
    p.add_argument('--nm', type=int, required=True)
    p.add_argument('--np', dest='n_p', type=int, required=True)
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--snr', type=_snr, default=math.inf)
    p.add_argument('--seed', type=int, required=True)
    p.add_argument('--kind', choices=KINDS, default='complex-gaussian')
    p.add_argument('--out', required=True, metavar='DIR')

    p = sub.add_parser('solve', help="run one solver")
    _add_problem_args(p)
    _add_solver_args(p)
    p.add_argument('--method', required=True,
                   choices=['reference'] + [m.value for m in Method])
    p.add_argument('--m', type=int, default=1, help="row divisions")
    p.add_argument('--n', type=int, default=1, help="column divisions")
    p.add_argument('--out', required=True, metavar='DIR')
    p.add_argument('--convention', choices=CONVENTIONS, default=SENDER_ONCE,
                   help="how broadcasts are counted in ledger.csv")
    p.add_argument('--fingerprint', action='store_true',
                   help="print a SHA-256 digest of all outputs")

    p = sub.add_parser('comm', help="communication counts per node")
    p.add_argument('--np', dest='n_p', type=int, required=True)
    p.add_argument('--nm', type=int, required=True)
    p.add_argument('--m', type=_int_list, default=[1],
                   help="row divisions: 4, 1..8 or 1,2,4")
    p.add_argument('--n', type=_int_list, default=[1],
                   help="column divisions: 3, 1..20 or 2,3,5")
    p.add_argument('--csv', metavar='PATH', help="also write rows as CSV")

    p = sub.add_parser('compare', help="run several solvers on one problem")
    _add_problem_args(p)
    _add_solver_args(p)
    p.add_argument('--methods', required=True,
                   help="comma list, e.g. reference,consensus:4,"
                        "sectioning:3,hybrid:4x3")
    p.add_argument('--out', metavar='PATH', help="JSON file (default stdout)")
    return parser


# -- problem and config resolution ------------------------------------------

def load_problem(args):
    gen_given = [x for x in ('k', 'seed', 'snr', 'kind')
                 if getattr(args, x) is not None]
    if args.problem is not None:
        if gen_given:
            raise UsageError(
                "give either --problem or a generation spec, not both "
                f"(got --problem and --{gen_given[0]})")
        H = read_cmat(os.path.join(args.problem, 'H.cmat'))
        g = read_cvec(os.path.join(args.problem, 'g.cmat'))
        truth_path = os.path.join(args.problem, 'truth.cmat')
        truth = read_cvec(truth_path) if os.path.exists(truth_path) else None
        for flag, want, have in (('--nm', args.nm, H.shape[0]),
                                 ('--np', args.n_p, H.shape[1])):
            if want is not None and want != have:
                raise UsageError(
                    f"{flag} {want} does not match the problem files "
                    f"({H.shape[0]}x{H.shape[1]})")
        return SensingProblem(H, g, truth)
    missing = [f for f, v in (('--nm', args.nm), ('--np', args.n_p),
                              ('--k', args.k), ('--seed', args.seed))
               if v is None]
    if missing:
        raise UsageError("no problem source: pass --problem DIR or "
                         f"a generation spec (missing {', '.join(missing)})")
    snr = math.inf if args.snr is None else args.snr
    return gen_problem(args.nm, args.n_p, args.k, snr, args.seed,
                       args.kind or 'complex-gaussian')


def make_config(args, problem):
    values = dict(DEFAULTS)
    if args.preset == 'paper':
        values.update(IMAGING_PRESET)
    for key, flag in (('rho', 'rho'), ('lam', 'lam'), ('scl', 'scl'),
                      ('max_iters', 'iters')):
        if getattr(args, flag) is not None:
            values[key] = getattr(args, flag)
    if args.lam_rel is not None:
        scaled = values['scl'] * problem.H
        values['lam'] = args.lam_rel * float(
            np.abs(scaled.conj().T @ (values['scl'] * problem.g)).max())
    return SolverConfig(eps_pri=args.eps_pri, eps_dual=args.eps_dual,
                        seed=args.seed or 0, threads=args.threads, **values)


# -- output writers -----------------------------------------------------------

def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator='\n')
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def trace_csv(report):
    t = report.trace
    rows = [(k + 1, repr(math.sqrt(p)), repr(math.sqrt(d)), repr(f))
            for k, (p, d, f) in enumerate(zip(t.primal_sq, t.dual_sq,
                                              t.objective))]
    return _csv_text(('iteration', 'primal_norm', 'dual_norm', 'objective'),
                     rows)


def ledger_csv(report, convention=SENDER_ONCE):
    rows = [(node, k, recv, sent, convention)
            for node, k, recv, sent in report.ledger.rows(convention)]
    return _csv_text(('node_id', 'iteration', 'received', 'sent',
                      'convention'), rows)


def metrics_dict(report):
    m = report.metrics
    return {
        'schema_version': SCHEMA_VERSION,
        'method': report.method,
        'm': report.m,
        'n': report.n,
        'nmse': None if m is None else m.nmse,
        'support_precision': None if m is None else m.support_precision,
        'support_recall': None if m is None else m.support_recall,
        'iterations_run': report.iterations_run,
        'objective': report.objective,
    }


def fingerprint(paths):
    h = hashlib.sha256()
    for path in sorted(paths):
        h.update(os.path.basename(path).encode())
        with open(path, 'rb') as fh:
            h.update(hashlib.sha256(fh.read()).digest())
    return h.hexdigest()


# -- subcommands --------------------------------------------------------------

def cmd_gen(args):
    problem = gen_problem(args.nm, args.n_p, args.k, args.snr, args.seed,
                          args.kind)
    os.makedirs(args.out, exist_ok=True)
    write_cmat(os.path.join(args.out, 'H.cmat'), problem.H)
    write_cvec(os.path.join(args.out, 'g.cmat'), problem.g)
    write_cvec(os.path.join(args.out, 'truth.cmat'), problem.truth)
    manifest = {
        'schema_version': SCHEMA_VERSION,
        'n_m': args.nm, 'n_p': args.n_p, 'k': args.k,
        'snr_db': None if math.isinf(args.snr) else args.snr,
        'seed': args.seed, 'kind': args.kind,
        'noise_sigma': problem.noise_sigma,
        'generator': 'numpy Philox',
    }
    with open(os.path.join(args.out, 'manifest.json'), 'w') as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write('\n')
    print(f"wrote {args.nm}x{args.n_p} {args.kind} problem to {args.out}")
    return 0


def cmd_solve(args):
    problem = load_problem(args)
    cfg = make_config(args, problem)
    try:
        report = solve(problem, cfg, args.method, args.m, args.n,
                       ragged=args.ragged)
    except NumericalError as exc:
        print(f"error: {exc}; last good iteration: {exc.iteration}",
              file=sys.stderr)
        return EXIT_NUMERICAL
    os.makedirs(args.out, exist_ok=True)
    paths = {name: os.path.join(args.out, name) for name in
             ('solution.cmat', 'trace.csv', 'ledger.csv', 'metrics.json')}
    write_cvec(paths['solution.cmat'], report.solution)
    with open(paths['trace.csv'], 'w', newline='') as fh:
        fh.write(trace_csv(report))
    with open(paths['ledger.csv'], 'w', newline='') as fh:
        fh.write(ledger_csv(report, args.convention))
    with open(paths['metrics.json'], 'w') as fh:
        json.dump(metrics_dict(report), fh, indent=2, sort_keys=True)
        fh.write('\n')
    print(f"{report.method}: {report.iterations_run} iterations, "
          f"objective {report.objective:.6g}, "
          f"primal {report.trace.primal[-1]:.3e}, "
          f"dual {report.trace.dual[-1]:.3e}")
    if args.fingerprint:
        print(f"fingerprint {fingerprint(paths.values())}")
    return 0


def _reduction(count, n_p):
    return format_percent(100 * (1 - count / (2 * n_p)))


def _count_text(count):
    if isinstance(count, int):
        return f"{count:,}"
    return f"~{float(count):,.1f}"


def cmd_comm(args):
    n_p, n_m = args.n_p, args.nm
    reports = [efficiency_report(n_p, n_m, m, n)
               for m in args.m for n in args.n]
    if any(x < 1 for x in args.m + args.n) or n_p < 1 or n_m < 1:
        raise UsageError("dimensions and divisions must be positive")
    single = len(reports) == 1
    if single and not reports[0].uniform:
        raise UsageError(f"M={args.m[0]} must divide N_m={n_m} and "
                         f"N={args.n[0]} must divide N_p={n_p}")
    print(f"N_p={n_p} N_m={n_m} R=N_p/N_m={float(Fraction(n_p, n_m)):.4f}")
    if single:
        rep = reports[0]
        print(f"M={rep.m} N={rep.n}")
        print(f"{'method':<12}{'elements/node/iter':>20}{'reduction':>12}")
        for meth in Method:
            count = rep.counts[meth.value]
            print(f"{meth.value:<12}{count:>20,}"
                  f"{_reduction(count, n_p):>12}")
        print(f"{'comparison':<26}{'by count':>10}{'by frontier':>13}")
        for c in rep.comparisons:
            flag = '' if c.agree else '  <- frontier disagrees with counts'
            print(f"{c.first + ' < ' + c.second:<26}"
                  f"{_yn(c.by_count):>10}{_yn(c.by_frontier):>13}{flag}")
        for note in _degenerate_notes(rep.m, rep.n):
            print(f"note: {note}")
    else:
        print(f"{'M':>3} {'N':>3} {'consensus':>10} {'sectioning':>11} "
              f"{'hybrid':>10} {'sect%':>7} {'hyb%':>7}  S<C  H<C  H<S")
        for rep in reports:
            c = rep.counts
            marks = ' '.join(f"{_yn(x.by_count) + ('' if x.agree else '*'):<4}"
                             for x in rep.comparisons)
            print(f"{rep.m:>3} {rep.n:>3} {_count_text(c['consensus']):>10} "
                  f"{_count_text(c['sectioning']):>11} "
                  f"{_count_text(c['hybrid']):>10} "
                  f"{_reduction(c['sectioning'], n_p):>7} "
                  f"{_reduction(c['hybrid'], n_p):>7}  {marks}"
                  f"{'' if rep.uniform else '  (uneven blocks)'}")
        print("verdicts by count; * marks disagreement with the frontier; "
              "~ marks idealized counts for uneven blocks")
    if args.csv:
        _write_comm_csv(args.csv, reports)
    return 0


def _yn(flag):
    return 'yes' if flag else 'no'


def _degenerate_notes(m, n):
    if m == 1 and n == 1:
        return ["M=N=1: hybrid is the undivided problem; its iterates equal "
                "consensus with M=1 and the reference solver"]
    if n == 1:
        return [f"N=1: hybrid iterates equal consensus with M={m}"]
    if m == 1:
        return [f"M=1: hybrid iterates equal sectioning with N={n}"]
    return []


def _write_comm_csv(path, reports):
    out = []
    for rep in reports:
        for c in rep.comparisons:
            out.append((rep.n_p, rep.n_m, rep.m, rep.n, int(rep.uniform),
                        *(float(rep.counts[k]) if not rep.uniform
                          else rep.counts[k]
                          for k in ('consensus', 'sectioning', 'hybrid')),
                        f"{c.first}<{c.second}", int(c.by_count),
                        int(c.by_frontier)))
    with open(path, 'w', newline='') as fh:
        fh.write(_csv_text(('n_p', 'n_m', 'm', 'n', 'uniform', 'consensus',
                            'sectioning', 'hybrid', 'comparison', 'by_count',
                            'by_frontier'), out))


def parse_method_specs(text):
    """``'reference,consensus:4,sectioning:3,hybrid:4x3'`` -> (method, m, n)."""
    specs = []
    for item in text.split(','):
        name, _, dims = item.strip().partition(':')
        try:
            if name == 'reference':
                if dims:
                    raise ValueError
                specs.append(('reference', 1, 1))
            elif name == 'consensus':
                specs.append((name, int(dims), 1))
            elif name == 'sectioning':
                specs.append((name, 1, int(dims)))
            elif name == 'hybrid':
                m, n = dims.split('x')
                specs.append((name, int(m), int(n)))
            else:
                raise ValueError
        except ValueError:
            raise UsageError(f"bad method spec {item!r}") from None
    return specs


def cmd_compare(args):
    specs = parse_method_specs(args.methods)
    problem = load_problem(args)
    cfg = make_config(args, problem)
    entries = []
    for method, m, n in specs:
        t0 = time.perf_counter()
        try:
            rep = solve(problem, cfg, method, m, n, ragged=args.ragged)
        except NumericalError as exc:
            print(f"error: {method} ({m}x{n}): {exc}; last good iteration: "
                  f"{exc.iteration}", file=sys.stderr)
            return EXIT_NUMERICAL
        elapsed = time.perf_counter() - t0
        comm = None
        if method != 'reference':
            comm = per_node_elements(method, problem.n_p, problem.n_m, m, n)
        entries.append({
            'method': method, 'm': m, 'n': n,
            'objective': rep.objective,
            'nmse': rep.metrics.nmse if rep.metrics else None,
            'primal_norm': rep.trace.primal[-1],
            'dual_norm': rep.trace.dual[-1],
            'iterations_run': rep.iterations_run,
            'elements_per_node_per_iter': comm,
            'wall_clock_s': elapsed,
        })
    out = {'schema_version': SCHEMA_VERSION,
           'problem': {'n_m': problem.n_m, 'n_p': problem.n_p},
           'config': {'rho': cfg.rho, 'lam': cfg.lam, 'scl': cfg.scl,
                      'max_iters': cfg.max_iters},
           'entries': entries,
           'winners': _winners(entries)}
    text = json.dumps(out, indent=2, sort_keys=True) + '\n'
    if args.out:
        with open(args.out, 'w') as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _winners(entries):
    def label(e):
        return {'reference': 'reference',
                'consensus': f"consensus:{e['m']}",
                'sectioning': f"sectioning:{e['n']}"}.get(
                    e['method'], f"hybrid:{e['m']}x{e['n']}")

    winners = {}
    for key in ('objective', 'nmse', 'primal_norm',
                'elements_per_node_per_iter', 'wall_clock_s'):
        scored = [e for e in entries if e[key] is not None]
        winners[key] = (label(min(scored, key=lambda e: e[key]))
                        if scored else None)
    return winners


COMMANDS = {'gen': cmd_gen, 'solve': cmd_solve, 'comm': cmd_comm,
            'compare': cmd_compare}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SplitADMMError, OSError) as exc:
        if isinstance(exc, NumericalError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
