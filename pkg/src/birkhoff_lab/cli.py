"""Command line front end: ``birkhoff-lab <subcommand> ...``.

Without ``--out-dir`` the main output goes to stdout.  With it, every output
is written to a file next to ``manifest.json``, which records the
parameters and the SHA-256 digest of each file.  Errors are printed to
stderr as one JSON object and mapped to exit codes 2 (precondition),
3 (budget) and 4 (invariant).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .birkhoff import (Analytic, birkhoff_series, discrepancy_star, hilbert_example, hilbert_fourier_side,
                       hilbert_partial, trig_coboundary)
from .cf import RotationNumber, convergents, partial_quotients, type_exponents
from .circle import GrowthGauge, PiecewiseFn, point_from_hex, point_to_hex
from .errors import BirkhoffLabError, PreconditionError
from .towers import build_partition


# ---------------------------------------------------------------------------
# output plumbing


class Outputs:
    def __init__(self):
        self.files: dict[str, str] = {}

    def json(self, name: str, obj) -> None:
        self.files[name] = json.dumps(obj, indent=1, sort_keys=True) + "\n"

    def csv(self, name: str, header, rows) -> None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        self.files[name] = buf.getvalue()


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def run_manifest(args, outputs: Outputs) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out_dir")}
    return {"subcommand": " ".join(x for x in (args.command, getattr(args, "sub", None)) if x),
            "parameters": params, "precision": args.precision, "seed": args.seed,
            "version": __version__,
            "outputs": {name: _digest(text) for name, text in sorted(outputs.files.items())}}


def _emit(args, outputs: Outputs) -> None:
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in outputs.files.items():
            (out / name).write_text(text)
        (out / "manifest.json").write_text(json.dumps(run_manifest(args, outputs), indent=1,
                                                       sort_keys=True) + "\n")
        return
    if len(outputs.files) == 1:
        sys.stdout.write(next(iter(outputs.files.values())))
    else:
        for name, text in outputs.files.items():
            sys.stdout.write(f"# {name}\n{text}")


# ---------------------------------------------------------------------------
# argument helpers


def _alpha(args) -> RotationNumber:
    return RotationNumber.parse(args.alpha, args.precision)


def load_function(text: str, precision: int):
    """A descriptor file written by ``zoo`` or one of the names
    ``sqrt2cos``, ``coboundary``, ``hilbert:<a>`` and ``zero``."""
    if text == "sqrt2cos":
        return Analytic(lambda x: math.sqrt(2) * np.cos(2 * np.pi * x), "sqrt2cos")
    if text == "zero":
        return Analytic(lambda x: np.zeros_like(x), "zero")
    if text == "coboundary":
        return "coboundary"
    if text.startswith("hilbert:"):
        return hilbert_example(float(text.split(":", 1)[1]))
    path = Path(text)
    if not path.exists():
        raise PreconditionError(f"no function named or stored at {text!r}")
    d = json.loads(path.read_text())
    d = d.get("function", d)
    return PiecewiseFn.from_json(d)


def _function(args, alpha=None):
    f = load_function(args.f, args.precision)
    if f == "coboundary":
        if alpha is None:
            raise PreconditionError("the coboundary needs a rotation number")
        return trig_coboundary(float(alpha))
    return f


def _gauge(text: str | None) -> GrowthGauge | None:
    if not text:
        return None
    key, _, val = text.partition("=")
    if key != "nu":
        raise PreconditionError("gauge must look like nu=0.5")
    return GrowthGauge.power(float(val))


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


# ---------------------------------------------------------------------------
# subcommands


def cmd_cf(args, out: Outputs):
    alpha = _alpha(args)
    q = partial_quotients(alpha, args.depth)
    conv = convergents(alpha, args.depth)
    tau = type_exponents(alpha, args.depth).to_list() if args.depth >= 3 else []
    out.json("cf.json", {"alpha": alpha.label, "precision": alpha.precision, "quotients": q,
                         "q": [c.q for c in conv], "convergents": [c.to_dict() for c in conv], "tau": tau})


def cmd_partition(args, out: Outputs):
    alpha = _alpha(args)
    part = build_partition(alpha, args.level, max_arcs=args.max_arcs)
    P = alpha.precision
    rows = ((lvl, j, point_to_hex(s, P), point_to_hex(length, P)) for lvl, j, s, length in part.rows())
    out.csv("partition.csv", ["family", "j", "start", "length"], rows)


def cmd_birkhoff(args, out: Outputs):
    alpha = _alpha(args)
    f = _function(args, alpha)
    x = point_from_hex(args.x, alpha.precision)
    gauge = _gauge(args.gauge)
    ser = birkhoff_series(f, alpha, x, args.n, args.stride, gauge)
    ratio = ser.ratio_runmax if ser.ratio_runmax is not None else np.full(ser.N, np.nan)
    rows = ((n + 1, repr(float(s)), repr(float(m)), repr(float(r)))
            for n, (s, m, r) in enumerate(zip(ser.values, ser.runmax, ratio)))
    out.csv("birkhoff.csv", ["n", "S_n", "runmax", "ratio"], rows)


def cmd_discrepancy(args, out: Outputs):
    alpha = _alpha(args)
    rows = []
    for n in _ints(args.n):
        r = discrepancy_star(alpha, n)
        rows.append((n, repr(r.star), r.index, repr(r.extreme)))
    out.csv("discrepancy.csv", ["n", "star", "index", "extreme"], rows)


def cmd_hilbert(args, out: Outputs):
    alpha = _alpha(args)
    direct = fourier = None
    if args.mode in ("direct", "both"):
        direct = hilbert_partial(hilbert_example(args.a), alpha, 0, args.n).partial
    if args.mode in ("fourier", "both"):
        fourier = hilbert_fourier_side(args.a, alpha, args.n)
    main = direct if direct is not None else fourier
    runsup = np.maximum.accumulate(np.abs(main))
    nan = np.full(args.n, np.nan)
    d, fo = (direct if direct is not None else nan), (fourier if fourier is not None else nan)
    rows = ((n + 1, repr(float(a)), repr(float(b)), repr(float(c))) for n, (a, b, c) in enumerate(zip(d, fo, runsup)))
    out.csv("hilbert.csv", ["n", "direct", "fourier", "runsup"], rows)


def _zoo_out(out: Outputs, f: PiecewiseFn | None, spec_json: dict, build: dict):
    spec_json = {**spec_json, "build": build}
    if f is not None:
        out.json("function.json", f.to_json())
    out.json("spec.json", spec_json)


def cmd_zoo(args, out: Outputs):
    from . import zoo

    build = {k: v for k, v in vars(args).items() if k not in ("func", "out_dir", "command", "threads")}
    if args.sub == "plateau":
        f, spec, m = zoo.build_plateau(_alpha(args), args.eps, GrowthGauge.power(args.nu), args.C, args.n,
                                       None, args.s, args.budget, args.delta)
        _zoo_out(out, f, {**spec.to_json(), "m": m}, build)
    elif args.sub == "holder":
        f, spec = zoo.build_holder(_alpha(args), args.xi, args.nu, args.A, args.s, args.delta, args.budget,
                                   args.nu_prime, args.n, require=not args.no_require)
        _zoo_out(out, f, spec.to_json(), build)
    elif args.sub == "rademacher":
        f, spec = zoo.build_rademacher_step(args.K, args.N, args.eps, args.seed, args.precision)
        _zoo_out(out, f, spec.to_json(), build)
    elif args.sub == "noncoboundary":
        f, spec = zoo.build_noncoboundary(_alpha(args), args.xi, args.K)
        _zoo_out(out, f, spec.to_json(), build)
    elif args.sub == "transfer":
        coeffs = {}
        for item in args.coeffs.split(","):
            k, _, c = item.partition(":")
            coeffs[int(k)] = complex(c.replace(" ", ""))
        r = zoo.trig_coboundary_transfer(coeffs, _alpha(args), seed=args.seed)
        enc = lambda d: {str(k): [v.real, v.imag] for k, v in sorted(d.items())}
        _zoo_out(out, None, {"kind": "transfer", "alpha": r.alpha_label, "h": enc(r.h_coeffs),
                             "g": enc(r.g_coeffs), "bound": r.bound, "min_distance": r.min_distance,
                             "identity_error": r.identity_error}, build)
    elif args.sub == "hilbert-example":
        xs = [float(v) for v in args.x.split(",")]
        vals = zoo.hilbert_example_eval(args.a, np.array(xs))
        out.csv("hilbert_example.csv", ["x", "f"], ((x, repr(float(v))) for x, v in zip(xs, vals)))


def cmd_mc(args, out: Outputs):
    from . import stochastic as st

    th = args.threads
    if args.sub == "menshov":
        rows = []
        for N in _ints(args.N):
            for prof in args.profile.split(","):
                r = st.menshov_check(N, st.coefficient_profile(prof, N, args.seed), args.samples, args.seed, th)
                rows.append((N, prof, repr(r.mean), repr(r.std_error), repr(r.bound), r.holds))
        out.csv("menshov.csv", ["N", "profile", "estimate", "std_error", "bound", "holds"], rows)
    elif args.sub == "lil":
        h = st.lil_horizon(args.eps, args.M, args.samples, args.seed, th)
        out.csv("lil.csv", ["N", "estimate", "half_width", "bound"],
                [(n, repr(p), repr(w), repr(1 - args.eps)) for n, p, w in h.schedule]
                + [(h.N, repr(h.confirm.estimate), repr(h.confirm.half_width), "confirm")])
    elif args.sub == "ortho":
        f = load_function(args.f, args.precision)
        G = st.orthonormality_check(f, args.kmax, args.samples, args.seed, th)
        tol = 3 / math.sqrt(args.samples)
        rows = ((i + 1, j + 1, repr(float(G[i, j])), repr(tol)) for i in range(len(G)) for j in range(len(G)))
        out.csv("ortho.csv", ["k", "j", "estimate", "bound"], rows)
    elif args.sub == "decay":
        f = load_function(args.f, args.precision)
        t = st.dyadic_decay(f, args.nu, args.kmax, args.samples, args.seed, args.fit_k, th)
        out.csv("decay.csv", ["k", "estimate", "half_width", "bound"],
                ((r["k"], repr(r["estimate"]), repr(r["half_width"]), repr(r["envelope"])) for r in t.rows()))
    elif args.sub == "key":
        from .zoo import build_rademacher_step

        _, spec = build_rademacher_step(args.K, args.N, args.eps, args.seed, args.precision)
        r = st.key_lemma_demo(spec, args.M, args.samples, args.seed, th)
        rows = []
        for name, res in (("overall", r.overall), ("in_good", r.in_good), ("control", r.control)):
            if res is not None:
                rows.append((name, repr(res.estimate), repr(res.half_width), res.samples, repr(r.threshold)))
        rows.append(("good_shift_measure", repr(float(spec.measure_good())), "", args.samples, ""))
        out.csv("key.csv", ["group", "estimate", "half_width", "samples", "bound"], rows)


def _rebuild(spec_json: dict, precision: int):
    from . import zoo

    b = spec_json.get("build")
    if not b:
        raise PreconditionError("spec file lacks the build parameters written by `zoo`")
    alpha = RotationNumber.parse(b["alpha"], b.get("precision", precision))
    if spec_json["kind"] == "plateau":
        return zoo.build_plateau(alpha, b["eps"], GrowthGauge.power(b["nu"]), b["C"], b["n"], None,
                                 b["s"], b["budget"], b["delta"])[1]
    if spec_json["kind"] == "holder":
        return zoo.build_holder(alpha, b["xi"], b["nu"], b["A"], b["s"], b["delta"], b["budget"],
                                b["nu_prime"], b["n"], require=not b["no_require"])[1]
    raise PreconditionError(f"no cover audit for {spec_json['kind']!r} specs")


def cmd_dim(args, out: Outputs):
    from . import dimension as dm

    if args.sub == "premeasure":
        cover = dm.Cover.from_json(json.loads(Path(args.cover).read_text()))
        out.csv("premeasure.csv", ["s", "pieces", "mesh", "pre_measure"],
                [(args.s, len(cover.lengths), repr(cover.mesh), repr(dm.pre_measure(cover, args.s)))])
    elif args.sub == "audit":
        spec = _rebuild(json.loads(Path(args.spec).read_text()), args.precision)
        rep = dm.construction_cover_audit(spec, args.s, args.delta, args.eps)
        rows = [(c["class"], c["count"], c["proof_count"], repr(c["length"]), repr(c["pre_measure"]),
                 repr(c["proof_pre_measure"])) for c in rep.classes]
        rows.append(("total", "", "", "", repr(rep.pre_measure), repr(rep.proof_pre_measure)))
        rows.append(("pass" if rep.passed else "fail", "", "", "", repr(args.eps), ""))
        out.csv("audit.csv", ["class", "count", "proof_count", "length", "pre_measure", "proof_pre_measure"], rows)
    elif args.sub == "slowset":
        alpha = _alpha(args)
        f = _function(args, alpha)
        r = dm.slow_set_sample(f, alpha, GrowthGauge.power(args.nu), args.B, args.M, args.N, args.grid)
        rows = [(j, c) for j, c in zip(r.scales, r.counts)]
        rows.append(("dimension", "undefined" if r.undefined else repr(r.dimension)))
        rows.append(("residual", "" if r.residual is None else repr(r.residual)))
        out.csv("slowset.csv", ["scale", "count"], rows)


# ---------------------------------------------------------------------------
# parser


def _global_flags(parser, defaults: bool) -> None:
    # Subcommands repeat the flags with suppressed defaults so a value given
    # before the subcommand is not reset by the subparser.
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    parser.add_argument("--precision", type=int, default=d(127), help="fixed-point bits P (8..127)")
    parser.add_argument("--seed", type=int, default=d(0))
    parser.add_argument("--threads", type=int, default=d(None),
                        help="worker threads (default: BIRKHOFF_LAB_THREADS or 1)")
    parser.add_argument("--out-dir", default=d(None), help="write outputs and manifest.json here")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, defaults=False)

    p = argparse.ArgumentParser(prog="birkhoff-lab", description="Birkhoff sums over irrational rotations.")
    _global_flags(p, defaults=True)
    sub = p.add_subparsers(dest="command", required=True)

    def add(parent, name, func, **kw):
        q = parent.add_parser(name, parents=[common], **kw)
        q.set_defaults(func=func)
        return q

    q = add(sub, "cf", cmd_cf, help="partial quotients, convergents and type exponents")
    q.add_argument("--alpha", required=True)
    q.add_argument("--depth", type=int, required=True)

    q = add(sub, "partition", cmd_partition, help="tower partition as CSV")
    q.add_argument("--alpha", required=True)
    q.add_argument("--level", type=int, required=True)
    q.add_argument("--max-arcs", type=int, default=10**7)

    q = add(sub, "birkhoff", cmd_birkhoff, help="Birkhoff sums along one orbit")
    q.add_argument("--f", required=True, help="descriptor JSON or sqrt2cos|coboundary|hilbert:<a>|zero")
    q.add_argument("--alpha", required=True)
    q.add_argument("--x", default="0x0", help="start point as a hex word")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--stride", type=int, default=1)
    q.add_argument("--gauge", default=None, help="nu=<value>")

    q = add(sub, "discrepancy", cmd_discrepancy, help="discrepancy of the orbit of 0")
    q.add_argument("--alpha", required=True)
    q.add_argument("--n", required=True, help="one or more comma separated lengths")

    q = add(sub, "hilbert", cmd_hilbert, help="Hilbert-type sums of the closed-form example")
    q.add_argument("--a", type=float, required=True)
    q.add_argument("--alpha", default="golden")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--mode", choices=["direct", "fourier", "both"], default="both")

    z = add(sub, "zoo", cmd_zoo, help="function constructions").add_subparsers(dest="sub", required=True)
    q = add(z, "plateau", cmd_zoo)
    q.add_argument("--alpha", default="golden")
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--nu", type=float, default=0.5, help="gauge psi(n) = n**nu")
    q.add_argument("--C", type=float, default=1.0)
    q.add_argument("--n", type=int, default=None)
    q.add_argument("--s", type=float, default=0.5)
    q.add_argument("--budget", type=float, default=0.5)
    q.add_argument("--delta", type=float, default=0.5)
    q = add(z, "holder", cmd_zoo)
    q.add_argument("--alpha", default="golden")
    q.add_argument("--xi", type=float, required=True)
    q.add_argument("--nu", type=float, required=True)
    q.add_argument("--A", type=float, default=1.0)
    q.add_argument("--s", type=float, default=None)
    q.add_argument("--delta", type=float, default=0.5)
    q.add_argument("--budget", type=float, default=0.05)
    q.add_argument("--nu-prime", type=float, default=None)
    q.add_argument("--n", type=int, default=None)
    q.add_argument("--no-require", action="store_true", help="build the given level even if it fails")
    q = add(z, "rademacher", cmd_zoo)
    q.add_argument("--K", type=int, required=True)
    q.add_argument("--N", type=int, required=True)
    q.add_argument("--eps", type=float, default=1.0)
    q = add(z, "noncoboundary", cmd_zoo)
    q.add_argument("--alpha", default="golden")
    q.add_argument("--xi", type=float, default=0.25)
    q.add_argument("--K", type=int, default=6)
    q = add(z, "transfer", cmd_zoo)
    q.add_argument("--alpha", default="golden")
    q.add_argument("--coeffs", required=True, help="k:c pairs, e.g. 1:0.5,-1:0.5")
    q = add(z, "hilbert-example", cmd_zoo)
    q.add_argument("--a", type=float, required=True)
    q.add_argument("--x", required=True, help="comma separated points")

    m = add(sub, "mc", cmd_mc, help="Monte Carlo checks").add_subparsers(dest="sub", required=True)
    q = add(m, "menshov", cmd_mc)
    q.add_argument("--N", default="1,4,16,64,256")
    q.add_argument("--profile", default="flat,harmonic,random")
    q.add_argument("--samples", type=int, default=10**4)
    q = add(m, "lil", cmd_mc)
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--M", type=int, required=True)
    q.add_argument("--samples", type=int, default=10**4)
    q = add(m, "ortho", cmd_mc)
    q.add_argument("--f", default="sqrt2cos")
    q.add_argument("--kmax", type=int, default=8)
    q.add_argument("--samples", type=int, default=10**6)
    q = add(m, "decay", cmd_mc)
    q.add_argument("--f", default="sqrt2cos")
    q.add_argument("--nu", type=float, required=True)
    q.add_argument("--kmax", type=int, default=14)
    q.add_argument("--fit-k", type=int, default=6)
    q.add_argument("--samples", type=int, default=10**4)
    q = add(m, "key", cmd_mc)
    q.add_argument("--K", type=int, default=4096)
    q.add_argument("--N", type=int, default=256)
    q.add_argument("--M", type=int, default=64)
    q.add_argument("--eps", type=float, default=1.0)
    q.add_argument("--samples", type=int, default=1000)

    d = add(sub, "dim", cmd_dim, help="covers and slow sets").add_subparsers(dest="sub", required=True)
    q = add(d, "premeasure", cmd_dim)
    q.add_argument("--cover", required=True)
    q.add_argument("--s", type=float, required=True)
    q = add(d, "audit", cmd_dim)
    q.add_argument("--spec", required=True)
    q.add_argument("--s", type=float, required=True)
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--eps", type=float, required=True)
    q = add(d, "slowset", cmd_dim)
    q.add_argument("--f", required=True)
    q.add_argument("--alpha", default="golden")
    q.add_argument("--nu", type=float, required=True)
    q.add_argument("--B", type=float, required=True)
    q.add_argument("--M", type=int, default=1)
    q.add_argument("--N", type=int, required=True)
    q.add_argument("--grid", type=int, default=1 << 12)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is None and os.environ.get("BIRKHOFF_LAB_THREADS"):
        args.threads = int(os.environ["BIRKHOFF_LAB_THREADS"])
    out = Outputs()
    try:
        args.func(args, out)
    except BirkhoffLabError as e:
        sys.stderr.write(json.dumps(e.to_dict()) + "\n")
        return e.exit_code
    except (ValueError, ZeroDivisionError) as e:
        sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e), "exit_code": 2}) + "\n")
        return 2
    _emit(args, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
