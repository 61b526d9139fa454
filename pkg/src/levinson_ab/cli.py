"""Command-line front end: ``levinson-ab <command> [options]``.

Every command prints one JSON document (``schema: 1``) unless it writes CSV.
Exit codes: 0 success, 1 input error, 2 degenerate case or failed check,
3 numerical non-convergence.
"""
import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .errors import InputError, LevinsonError
from .extensions import (check_alpha, classify, from_unitary, matrix_to_json,
                         random_pair, require_admissible, to_unitary)

SCHEMA = 1
SUITE_ALPHAS = (0.1, 0.25, 0.5, 0.75, 0.9)

EMIT_FORMATS = """\
CSV outputs

levinson --emit-edges FILE
    edge_id,parameter,re11,im11,re12,im12,re21,im21,re22,im22,det_phase
    one row per sample in loop order B1, B2, B3, B4; parameter is x for
    B1/B3 and kappa for B2/B4 (0 and inf at the ends); det_phase is the
    unwrapped argument of det Gamma along the edge.

smatrix --kappa-grid lo:hi:n [--out FILE]
    kappa,re11,im11,re12,im12,re21,im21,re22,im22,det_phase
    n log-spaced kappa values from lo to hi.

chern --emit-curvature FILE
    rho,phi,flux
    one row per lattice plaquette, at its centre; flux in (-pi, pi].
"""


def parse_matrix(text):
    """``I``, ``-I``, ``0`` or 8 comma-separated reals (re, im pairs, row-major)."""
    t = text.strip().replace(" ", "")
    named = {"I": np.eye(2), "-I": -np.eye(2), "0": np.zeros((2, 2))}
    if t in named:
        return named[t].astype(complex)
    try:
        vals = [float(v) for v in t.split(",")]
    except ValueError:
        raise InputError(f"cannot parse matrix {text!r}") from None
    if len(vals) != 8:
        raise InputError(f"matrix needs 8 reals, got {len(vals)}")
    v = np.array(vals)
    return (v[0::2] + 1j * v[1::2]).reshape(2, 2)


def parse_complex(text):
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise InputError(f"cannot parse complex number {text!r}") from None


def parse_grid(text, n):
    try:
        parts = [int(p) for p in text.lower().split("x")]
    except ValueError:
        raise InputError(f"cannot parse grid {text!r}") from None
    if len(parts) != n or min(parts) <= 0:
        raise InputError(f"grid {text!r} needs {n} positive sizes")
    return parts


def _pair(args):
    if args.U is not None:
        if args.C is not None or args.D is not None:
            raise InputError("give either --U or --C/--D")
        U = parse_matrix(args.U)
        if np.linalg.norm(U.conj().T @ U - np.eye(2)) > 1e-10:
            raise InputError("--U is not unitary")
        return from_unitary(U)
    if args.C is None or args.D is None:
        raise InputError("need --C and --D (or --U)")
    return require_admissible(parse_matrix(args.C), parse_matrix(args.D))


def _alpha(args):
    if args.alpha is None:
        raise InputError("--alpha is required")
    return check_alpha(args.alpha)


def _emit(doc, out=None):
    doc = {"schema": SCHEMA, **doc}
    text = json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not serializable: {type(o).__name__}")


def _pair_doc(C, D, alpha):
    return {"C": matrix_to_json(C), "D": matrix_to_json(D),
            "U": matrix_to_json(to_unitary(C, D)), "alpha": alpha}


def _classify_any_alpha(C, D):
    """Classification for a pair whose label and phases do not depend on alpha."""
    cases = [classify(C, D, a) for a in (0.25, 0.5, 0.75)]
    if any(c.label != cases[0].label or not np.allclose(c.phi, cases[0].phi) for c in cases):
        raise InputError(f"case depends on alpha ({', '.join(c.label for c in cases)}); give --alpha")
    return cases[0]


def cmd_classify(args):
    C, D = _pair(args)
    if args.alpha is None:
        alpha, case = None, _classify_any_alpha(C, D)
    else:
        alpha = _alpha(args)
        case = classify(C, D, alpha)
    _emit({"command": "classify", "input": _pair_doc(C, D, alpha), "case": case.to_dict()}, args.out)
    return 0


def _check_one(task):
    from .winding import levinson_check
    name, C, D, alpha = task
    try:
        ok, rep = levinson_check(C, D, alpha)
        return {"name": name, "alpha": alpha, "ok": ok, **rep.to_dict()}
    except LevinsonError as err:
        return {"name": name, "alpha": alpha, "ok": False,
                "error": type(err).__name__, "message": str(err)}


def _run_tasks(tasks, jobs):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_check_one, tasks, chunksize=8))
    return [_check_one(t) for t in tasks]


def cmd_levinson(args):
    from .fixtures import table_fixtures
    from .winding import edges_csv, loop_samples
    if args.table_suite:
        tasks = [(f.label, f.C, f.D, f.alpha) for f in table_fixtures()]
    elif args.random:
        alphas = [args.alpha] if args.alpha is not None else list(SUITE_ALPHAS)
        tasks = []
        for i in range(args.random):
            C, D = random_pair(args.seed + i)
            for a in alphas:
                tasks.append((f"seed{args.seed + i}", C, D, check_alpha(a)))
    else:
        C, D = _pair(args)
        alpha = _alpha(args)
        tasks = [("input", C, D, alpha)]
        if args.emit_edges:
            with open(args.emit_edges, "w") as fh:
                fh.write(edges_csv(loop_samples(C, D, alpha)))
    rows = _run_tasks(tasks, args.jobs)
    passed = sum(r["ok"] for r in rows)
    if args.table_suite or args.random:
        for r in rows:
            status = "pass" if r["ok"] else "FAIL"
            print(f"{status} {r['name']:<10s} alpha={r['alpha']:<5g} "
                  f"wind={r.get('wind', '-')} bound={r.get('bound_count', '-')}", file=sys.stderr)
        print(f"{passed}/{len(rows)} pass", file=sys.stderr)
    _emit({"command": "levinson", "passed": passed, "total": len(rows), "results": rows}, args.out)
    return 0 if passed == len(rows) else 2


def cmd_spectrum(args):
    from .weyl_spectrum import bound_states
    C, D = _pair(args)
    alpha = _alpha(args)
    pts = bound_states(C, D, alpha)
    _emit({"command": "spectrum", "input": _pair_doc(C, D, alpha),
           "bound_states": [p.to_dict() for p in pts],
           "total_multiplicity": sum(p.multiplicity for p in pts)}, args.out)
    return 0


def cmd_smatrix(args):
    from .scattering import gamma_edges, s_matrix
    C, D = _pair(args)
    alpha = _alpha(args)
    if args.kappa_grid:
        try:
            lo, hi, n = args.kappa_grid.split(":")
            lo, hi, n = float(lo), float(hi), int(n)
        except ValueError:
            raise InputError(f"cannot parse --kappa-grid {args.kappa_grid!r}") from None
        if not (0 < lo < hi) or n < 2:
            raise InputError("--kappa-grid needs 0 < lo < hi and n >= 2")
        kap = np.geomspace(lo, hi, n)
        S = gamma_edges(C, D, alpha).gamma2(kap)
        ph = np.unwrap(np.angle(S[:, 0, 0] * S[:, 1, 1] - S[:, 0, 1] * S[:, 1, 0]))
        lines = ["kappa,re11,im11,re12,im12,re21,im21,re22,im22,det_phase"]
        for k, m, p in zip(kap, S, ph):
            nums = ",".join(f"{v.real:.12g},{v.imag:.12g}" for v in m.ravel())
            lines.append(f"{k:.12g},{nums},{p:.12g}")
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    if args.kappa is None:
        raise InputError("need --kappa or --kappa-grid")
    S = s_matrix(C, D, alpha, args.kappa)
    _emit({"command": "smatrix", "input": _pair_doc(C, D, alpha), "kappa": args.kappa,
           "S": matrix_to_json(S),
           "unitarity_residual": float(np.abs(S.conj().T @ S - np.eye(2)).max())}, args.out)
    return 0


def _spec(args):
    from .chern import ManifoldSpec
    return ManifoldSpec(parse_complex(args.l1), parse_complex(args.l2), _alpha(args))


def cmd_chern(args):
    from .chern import chern_boundary, chern_lattice, chern_lattice_flux_csv
    spec = _spec(args)
    res = {}
    if args.method in ("boundary", "both"):
        res["boundary"] = chern_boundary(spec).to_dict()
    if args.method in ("lattice", "both"):
        nb, nphi = parse_grid(args.grid, 2)
        lat = chern_lattice(spec, (nb, nphi))
        if args.emit_curvature:
            with open(args.emit_curvature, "w") as fh:
                fh.write(chern_lattice_flux_csv(lat))
        d = lat.to_dict()
        d.pop("curvature")
        res["lattice"] = d
    _emit({"command": "chern", "spec": {"l1": spec.l1, "l2": spec.l2, "alpha": spec.alpha},
           "results": res}, args.out)
    return 0


def cmd_trace3(args):
    from .chern import trace3_degree
    spec = _spec(args)
    nb, nphi, ne, nt = parse_grid(args.grid, 4)
    if ne != 4:
        raise InputError("the loop has 4 edges")
    res = trace3_degree(spec, (nb, nphi, nt), reverse=args.reverse, check_doubling=args.check_doubling)
    _emit({"command": "trace3", "spec": {"l1": spec.l1, "l2": spec.l2, "alpha": spec.alpha},
           **res}, args.out)
    return 0


def _default_jobs():
    try:
        return max(1, int(os.environ.get("LEVINSON_AB_JOBS", "1")))
    except ValueError:
        return 1


def build_parser():
    ap = argparse.ArgumentParser(
        prog="levinson-ab",
        description="Levinson-type identities for the Aharonov-Bohm extension family.",
        epilog="'levinson-ab --help emit-formats' documents the CSV columns.")
    sub = ap.add_subparsers(dest="command", required=True)

    def pair_opts(p, need_alpha=True):
        p.add_argument("--C", help="matrix: I, -I, 0 or 8 reals (re,im row-major)")
        p.add_argument("--D", help="matrix, same grammar as --C")
        p.add_argument("--U", help="unitary parameter instead of --C/--D")
        p.add_argument("--alpha", type=float, help="flux in (0, 1)")
        p.add_argument("--out", help="write the JSON report here instead of stdout")

    p = sub.add_parser("classify", help="case label and predicted phases")
    pair_opts(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("levinson", help="winding of det Gamma versus bound states")
    pair_opts(p)
    p.add_argument("--table-suite", action="store_true", help="run every table fixture")
    p.add_argument("--random", type=int, default=0, metavar="N", help="N seeded random pairs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=_default_jobs(),
                   help="worker processes (default: $LEVINSON_AB_JOBS or 1)")
    p.add_argument("--emit-edges", metavar="FILE", help="CSV of the sampled edges")
    p.set_defaults(func=cmd_levinson)

    p = sub.add_parser("spectrum", help="negative eigenvalues with multiplicity")
    pair_opts(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("smatrix", help="scattering matrix at one kappa or on a log grid")
    pair_opts(p)
    p.add_argument("--kappa", type=float)
    p.add_argument("--kappa-grid", metavar="LO:HI:N")
    p.set_defaults(func=cmd_smatrix)

    for name, helptext in (("chern", "Chern number of the bound-state bundle"),
                           ("trace3", "degree-3 pairing over X x loop")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--l1", default="-i", help="eigenvalue with Im < 0")
        p.add_argument("--l2", default="i", help="eigenvalue with Im > 0")
        p.add_argument("--alpha", type=float, default=0.5)
        p.add_argument("--out")
        if name == "chern":
            p.add_argument("--method", choices=("boundary", "lattice", "both"), default="both")
            p.add_argument("--grid", default="64x64", help="lattice N_beta x N_phi")
            p.add_argument("--emit-curvature", metavar="FILE")
            p.set_defaults(func=cmd_chern)
        else:
            p.add_argument("--grid", default="48x48x4x96", help="N_beta x N_phi x edges x N_t")
            p.add_argument("--reverse", action="store_true", help="traverse the loop backwards")
            p.add_argument("--check-doubling", action="store_true")
            p.set_defaults(func=cmd_trace3)
    return ap


# options whose values may start with '-' (matrices like -I, complex like -i)
SIGNED_VALUE_OPTS = ("--C", "--D", "--U", "--l1", "--l2")


def _attach_signed_values(argv):
    """Rewrite ``--C -I`` as ``--C=-I`` so argparse does not read ``-I`` as an option."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in SIGNED_VALUE_OPTS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    argv = _attach_signed_values(sys.argv[1:] if argv is None else list(argv))
    if argv[:2] == ["--help", "emit-formats"] or argv[:2] == ["help", "emit-formats"]:
        sys.stdout.write(EMIT_FORMATS)
        return 0
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LevinsonError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return err.exit_code
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
