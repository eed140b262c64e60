"""Command-line front end.

Exit codes: 0 ok, 2 parse error, 3 general position could not be reached,
4 verification failure, 5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import shlex
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

EXIT_OK, EXIT_PARSE, EXIT_GP, EXIT_VERIFY, EXIT_IO = 0, 2, 3, 4, 5

SWEEP_COLUMNS = [
    "n",
    "seed",
    "area",
    "sys_u_est",
    "sys_v_est",
    "extrinsic_upper",
    "thm13_bound",
    "thmA2_bound",
    "kind",
    "x1_hits",
    "j_length",
    "hypothesis",
    "spacing",
    "witness_bound",
    "witness_diameter",
]

SWEEP_HELP = """CSV columns: n (family parameter), seed (per-instance seed), area,
sys_u_est and sys_v_est (edge-graph systoles of u and v), extrinsic_upper
(smallest diameter of a v representative found), thm13_bound
(sys_u^-1/3 area^2/3 + area/sys_u), thmA2_bound (area/min(sys_u, sys_v)),
kind (certificate kind, or error:<type> when the instance failed), x1_hits
and j_length (size of the lattice intersection used), hypothesis (1 if
sys_u_est >= 20(x1_hits+1) j_length), spacing (lattice spacing used),
witness_bound (sqrt(3) * spacing), witness_diameter (diameter of the
v-in-cube witness loop, empty for short-u), and runtime in seconds with --timing.
The first line is a '#' comment echoing the command."""


class CliError(Exception):
    def __init__(self, code, msg):
        super().__init__(msg)
        self.code = code


def _threads(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get("EXSYS_THREADS", default)))
    except ValueError:
        return default


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot write {path}: {e}") from e


def _read_mesh(path):
    from .surface import MeshError, read_mesh

    try:
        mesh = read_mesh(path)
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot read {path}: {e}") from e
    except MeshError as e:
        raise CliError(EXIT_PARSE, f"{path}: {e}") from e
    try:
        mesh.validate()
    except MeshError as e:
        raise CliError(EXIT_PARSE, f"{path}: invalid mesh: {e}") from e
    return mesh


def _fraction(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from e


def _range(s: str) -> list[int]:
    """'a..b' or 'a:b' (inclusive), or a comma list; '' or 'a..b' with b < a is empty."""
    s = s.strip()
    if not s:
        return []
    for sep in ("..", ":"):
        if sep in s:
            a, b = s.split(sep, 1)
            return list(range(int(a), int(b) + 1))
    return [int(x) for x in s.split(",") if x]


def _params(items) -> dict:
    out = {}
    for it in items or []:
        k, sep, v = it.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"--param expects key=value, got {it!r}")
        out[k] = Fraction(v) if "/" in v or "." in v else int(v)
    return out


def _config(argv) -> str:
    return "exsys " + " ".join(shlex.quote(a) for a in argv)


# commands


def cmd_gen(args, argv) -> int:
    from .generators import GeneratorSpec, generate

    params = _params(args.param)
    if args.n is not None:
        params["n"] = args.n
    if args.res is not None:
        params["res"] = args.res
    spec = GeneratorSpec(args.family, params, args.seed)
    try:
        mesh = generate(spec)
    except ValueError as e:
        raise CliError(EXIT_PARSE, str(e)) from e
    mesh.meta["generator"] = args.family
    mesh.meta["params"] = " ".join(f"{k}={params[k]}" for k in sorted(params))
    _write(args.out, mesh.dumps())
    return EXIT_OK


def cmd_intersect(args, argv) -> int:
    from .surface import HomologyLabeling
    from .surface.intersect import GeneralPositionError, intersect_lattice, intersection_report
    from .surface.mesh import rational

    mesh = _read_mesh(args.mesh)
    h = args.spacing
    if h is None:
        raise CliError(EXIT_PARSE, "intersect needs --spacing")
    if args.offset:
        offs = [tuple(_fraction(x) for x in args.offset.split())]
    else:
        rng = np.random.default_rng(args.seed)
        offs = [tuple(rational(x * float(h)) for x in rng.random(3)) for _ in range(args.tries)]
    last = None
    for off in offs:
        try:
            data = intersect_lattice(mesh, h, off)
            break
        except GeneralPositionError as e:
            last = e
    else:
        raise CliError(EXIT_GP, str(last))
    text = f"# config = {_config(argv)}\n" + intersection_report(data, HomologyLabeling.build(mesh))
    _write(args.out, text)
    return EXIT_OK


def _run_pipeline(mesh, args, fstar):
    from .certify import run_main_theorem

    return run_main_theorem(
        mesh,
        seed=args.seed,
        samples=args.samples,
        spacing=None if args.auto_m else args.spacing,
        fstar=fstar,
    )


def cmd_pipeline(args, argv) -> int:
    from .certify import GeneralPositionExhausted, VerificationError, parse_fstar
    from .surface.intersect import GeneralPositionError

    if args.spacing is None and not args.auto_m:
        args.auto_m = True
    fstar = parse_fstar(args.fstar) if args.fstar else None
    mesh = _read_mesh(args.mesh)
    try:
        res = _run_pipeline(mesh, args, fstar)
    except (GeneralPositionExhausted, GeneralPositionError) as e:
        raise CliError(EXIT_GP, str(e)) from e
    except (VerificationError, AssertionError) as e:
        raise CliError(EXIT_VERIFY, f"verification failed: {e}") from e
    cert = res.certificate
    cert.config = _config(argv)
    text = cert.dumps(res.data.refined)
    r = res.report
    summary = [
        f"kind = {cert.kind}",
        f"m = {res.m:.15g}",
        f"spacing = {res.spacing}",
        f"x1_hits = {len(res.data.hits)}",
        f"j_length = {res.data.total_length:.15g}",
        f"hypothesis = {int(res.threshold_hypothesis)}",
        f"witness_bound = {res.witness_bound:.15g}",
    ]
    if cert.kind == "v-in-cube":
        summary.append(f"witness_diameter = {cert.diameter:.15g}")
    report = f"# config = {_config(argv)}\n" + "[run]\n" + "\n".join(summary) + "\n" + r.dumps()
    if args.out:
        _write(args.out + ".cert", text)
        _write(args.out + ".report", report)
    else:
        sys.stdout.write(report)
    return EXIT_OK


def cmd_verify_certificate(args, argv) -> int:
    from .certify import Certificate, VerificationError, verify_certificate

    mesh = _read_mesh(args.mesh)
    try:
        with open(args.certificate) as fh:
            text = fh.read()
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot read {args.certificate}: {e}") from e
    try:
        cert = Certificate.loads(text)
    except (ValueError, KeyError) as e:
        raise CliError(EXIT_PARSE, f"{args.certificate}: {e}") from e
    try:
        info = verify_certificate(cert, mesh)
    except (VerificationError, AssertionError, ValueError, KeyError) as e:
        raise CliError(EXIT_VERIFY, f"certificate rejected: {e}") from e
    sys.stdout.write("verified " + " ".join(f"{k}={v}" for k, v in info.items()) + "\n")
    return EXIT_OK


LEMMA_BUDGETS = {
    "boundary": {"random_cases": 1000},
    "additivity": {"cases": 1000},
    "decomposition": {"cases": 1000},
    "homology": {"cases": 10},
    "incidence": {"cases": 1000},
    "lattice-filling": {"random_cases": 1000},
    "refined-filling": {},
    "averaging": {"samples": 2000},
}


def cmd_verify_lemmas(args, argv) -> int:
    from .suites import SUITES, run_suite

    names = [args.lemma] if args.lemma else list(SUITES)
    lines = [f"# config = {_config(argv)}"]
    failed = []
    for name in names:
        kw = dict(LEMMA_BUDGETS[name])
        if name != "refined-filling":
            kw["seed"] = args.seed
        if name == "lattice-filling":
            kw["max_len"] = args.max_len
            kw["oracle"] = args.oracle
        res = run_suite(name, **kw)
        lines.append(res.line())
        if not res.passed:
            failed.append(res)
    text = "\n".join(lines) + "\n"
    _write(args.out, text)
    if failed:
        repro = "".join(f"[{r.name}]\n{r.repro}\n" for r in failed)
        path = (args.out + ".repro") if args.out not in (None, "-") else "verify-lemmas.repro"
        _write(path, repro)
        return EXIT_VERIFY
    return EXIT_OK


def _sweep_mesh(family, n, params):
    from .generators import GeneratorSpec, generate

    p = dict(params)
    p["n"] = n
    return generate(GeneratorSpec(family, p))


def sweep_row(family, n, seed, params, spacing=None, samples=200, timing=False):
    """One CSV row for one instance; failures are reported in the kind column."""
    from .certify import run_main_theorem

    t = time.perf_counter()
    row = {"n": n, "seed": seed}
    try:
        mesh = _sweep_mesh(family, n, params)
        res = run_main_theorem(mesh, seed=seed, samples=samples, spacing=spacing)
        r = res.report
        row.update(
            area=f"{r.area:.15g}",
            sys_u_est=f"{r.sys_u_est:.15g}",
            sys_v_est=f"{r.sys_v_est:.15g}",
            extrinsic_upper=f"{r.extrinsic_upper:.15g}",
            thm13_bound=f"{r.thm13_bound:.15g}",
            thmA2_bound=f"{r.thmA2_bound:.15g}",
            kind=res.certificate.kind,
            x1_hits=len(res.data.hits),
            j_length=f"{res.data.total_length:.15g}",
            hypothesis=int(res.threshold_hypothesis),
            spacing=str(res.spacing),
            witness_bound=f"{res.witness_bound:.15g}",
        )
        if res.certificate.kind == "v-in-cube":
            row["witness_diameter"] = f"{res.certificate.diameter:.15g}"
    except Exception as e:  # noqa: BLE001 - the row records the failure and the sweep continues
        row["kind"] = f"error:{type(e).__name__}"
    if timing:
        row["runtime"] = f"{time.perf_counter() - t:.3f}"
    return row


def _sweep_job(job):
    return sweep_row(*job)


def instance_seeds(master: int, count: int) -> list[int]:
    """Per-instance seeds derived from the master seed (independent of worker count)."""
    ss = np.random.SeedSequence(master)
    return [int(c.generate_state(1)[0]) for c in ss.spawn(count)]


def run_sweep(family, ns, seed=0, params=None, spacing=None, samples=200, timing=False, workers=None, config="") -> str:
    seeds = instance_seeds(seed, len(ns))
    jobs = [(family, n, s, params or {}, spacing, samples, timing) for n, s in zip(ns, seeds)]
    workers = workers or _threads()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as ex:
            rows = list(ex.map(_sweep_job, jobs))
    else:
        rows = [_sweep_job(j) for j in jobs]
    cols = SWEEP_COLUMNS + (["runtime"] if timing else [])
    buf = io.StringIO()
    if config:
        buf.write(f"# {config}\n")
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", restval="")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def cmd_sweep(args, argv) -> int:
    ns = _range(args.range)
    text = run_sweep(
        args.family,
        ns,
        args.seed,
        _params(args.param),
        args.spacing,
        args.samples,
        args.timing,
        args.workers,
        _config(argv),
    )
    _write(args.out, text)
    return EXIT_OK


def cmd_bounds(args, argv) -> int:
    from .certify import a3_report, evaluate_bounds, parse_fstar

    fstar = parse_fstar(args.fstar) if args.fstar else None
    if fstar is not None:
        try:
            a3_report(fstar)
        except ValueError as e:
            raise CliError(EXIT_PARSE, str(e)) from e
    if args.mesh is None:
        if fstar is None:
            raise CliError(EXIT_PARSE, "bounds needs --mesh or --fstar")
        r = a3_report(fstar)
        lines = [
            "[a3]",
            f"fstar = {args.fstar}",
            f"sys_u = {r.sys_u:.15g}",
            f"sys_v = {r.sys_v:.15g}",
            f"pred_main = {r.pred_main:.15g}",
            f"pred_area = {r.pred_area:.15g}",
            f"nash = {r.nash:.15g}",
            f"winner = {r.winner}",
        ]
        _write(args.out, "\n".join(lines) + "\n")
        return EXIT_OK
    mesh = _read_mesh(args.mesh)
    report, _ = evaluate_bounds(mesh, fstar)
    _write(args.out, f"# config = {_config(argv)}\n" + report.dumps())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="exsys", description="Extrinsic systole toolkit for embedded tori.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, mesh=True):
        if mesh:
            sp.add_argument("--mesh", required=True, help="mesh file (torus-mesh v1)")
        sp.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        sp.add_argument("--out", default=None, help="output path (default stdout)")

    g = sub.add_parser("gen", help="generate a marked torus mesh")
    g.add_argument("--family", required=True, choices=["twisted-cylinder", "knot-tube", "standard-torus", "flat-rectangular"])
    g.add_argument("--n", type=int, default=None, help="twist count or knot parameter")
    g.add_argument("--res", type=int, default=None, help="resolution along the long direction")
    g.add_argument("--param", action="append", help="extra generator parameter key=value (repeatable)")
    common(g, mesh=False)

    i = sub.add_parser("intersect", help="intersect a mesh with an offset lattice")
    common(i)
    i.add_argument("--spacing", type=_fraction, default=None, help="lattice spacing (rational)")
    i.add_argument("--offset", default=None, help="lattice offset 'x y z' (rationals); random from --seed if omitted")
    i.add_argument("--tries", type=int, default=20, help="random offsets tried for general position (default 20)")

    pl = sub.add_parser("pipeline", help="run the cube-or-short-curve pipeline and bounds")
    common(pl)
    grp = pl.add_mutually_exclusive_group()
    grp.add_argument("--spacing", type=_fraction, default=None, help="explicit lattice spacing (skips the offset search)")
    grp.add_argument("--auto-m", action="store_true", help="lattice density from the u-systole (default)")
    pl.add_argument("--samples", type=int, default=200, help="offset samples for the search (default 200)")
    pl.add_argument("--fstar", default=None, help="homology matrix a,b,c,d for the A3 predictions")

    v = sub.add_parser("verify-certificate", help="re-check a certificate against its mesh")
    v.add_argument("certificate")
    v.add_argument("mesh")

    vl = sub.add_parser("verify-lemmas", help="run the property suites")
    vl.add_argument("--lemma", default=None, choices=sorted(LEMMA_BUDGETS), help="run one suite only")
    vl.add_argument("--max-len", type=int, default=12, help="loop length for the exhaustive filling suite")
    vl.add_argument("--oracle", action="store_true", help="compare fillings with the exact optimum")
    common(vl, mesh=False)

    sw = sub.add_parser("sweep", help="run a family sweep and write CSV", epilog=SWEEP_HELP)
    sw.add_argument("--family", required=True, choices=["twisted-cylinder", "knot-tube", "standard-torus", "flat-rectangular"])
    sw.add_argument("--range", default="", help="parameter range a..b (inclusive) or comma list")
    sw.add_argument("--param", action="append", help="fixed generator parameter key=value")
    sw.add_argument("--spacing", type=_fraction, default=None, help="explicit lattice spacing instead of the automatic density")
    sw.add_argument("--samples", type=int, default=200, help="offset samples per instance")
    sw.add_argument("--workers", type=int, default=None, help="worker processes (default EXSYS_THREADS or 1)")
    sw.add_argument("--timing", action="store_true", help="add a runtime column (makes output non-reproducible)")
    common(sw, mesh=False)

    b = sub.add_parser("bounds", help="evaluate the bounds on a mesh or an f_* matrix")
    b.add_argument("--mesh", default=None)
    b.add_argument("--fstar", default=None, help="a,b,c,d with ad - bc = 1")
    b.add_argument("--out", default=None)
    return p


COMMANDS = {
    "gen": cmd_gen,
    "intersect": cmd_intersect,
    "pipeline": cmd_pipeline,
    "verify-certificate": cmd_verify_certificate,
    "verify-lemmas": cmd_verify_lemmas,
    "sweep": cmd_sweep,
    "bounds": cmd_bounds,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return COMMANDS[args.command](args, argv)
    except CliError as e:
        print(f"exsys: {e}", file=sys.stderr)
        return e.code
    except argparse.ArgumentTypeError as e:
        print(f"exsys: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as e:
        print(f"exsys: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
