"""Command line interface.

Exit codes: 0 pass, 1 verification failure, 2 invalid input, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .hyperelliptic import alternating_divisor, hyper_certificate, hyper_pencil_from_divisor, projection
from .models import (ModelError, SpaceSextic, model_hyperelliptic, model_sextic,
                     validate_smoothness)
from .morphisms import MorphismError
from .quadric import classify_quadric
from .realizations import realize_target
from .reports import VerifyParams, _plain, default_seed, run_verify_hyper, run_verify_table
from .topology import TopologyError, complex_orientation, trace_real_locus
from .tracing import TracingError

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


def _dump(obj, out=None):
    text = json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_curve(path) -> SpaceSextic:
    with open(path) as fh:
        return SpaceSextic.from_json(json.load(fh))


def _analyzed(path, step):
    C = _load_curve(path)
    cert = validate_smoothness(C)
    if not cert.ok:
        raise ModelError(f"curve is not smooth: {cert.reason}")
    return C.with_certificate(cert), trace_real_locus(C, step=step)


def _params(args) -> VerifyParams:
    return VerifyParams(seed=args.seed, samples=args.samples, step=args.step, tol_im=args.tol,
                        epsilon=getattr(args, "epsilon", None))


def cmd_classify(args):
    vals = [float(v) for v in args.matrix.replace(";", ",").split(",")]
    if len(vals) != 16:
        raise ValueError("give 16 comma-separated matrix entries (row major)")
    X = classify_quadric(np.array(vals).reshape(4, 4))
    _dump({"kind": X.kind, "normalizer": X.normalizer.tolist()})
    return EXIT_PASS


def cmd_model(args):
    C, locus = model_sextic(args.kind, args.r, args.l, eps=args.epsilon, step=args.step)
    _dump(C.to_json() | {"topology": locus.summary()}, args.out)
    return EXIT_PASS


def cmd_analyze(args):
    C, locus = _analyzed(args.curve, args.step)
    _dump({"smoothness": C.smoothness.to_json(), "topology": locus.summary()}, args.out)
    return EXIT_PASS


def cmd_realize(args):
    C, locus = _analyzed(args.curve, args.step)
    target = tuple(int(v) for v in args.target.split(","))
    R = realize_target(C, locus, target, n_samples=args.samples, seed=args.seed)
    out = R.to_json()
    if R.ok:
        out["complex_orientation"] = complex_orientation(locus, R.morphism).to_json()
    _dump(out, args.out)
    return EXIT_PASS if R.ok else EXIT_FAIL


def cmd_verify_table(args):
    R = run_verify_table(args.kind, args.r, args.l, args.bound, _params(args))
    text = R.dumps()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"verify-table {args.kind} {args.r} {args.l}: {'pass' if R.verdict else 'fail'} "
          f"({R.runtime:.1f} s)", file=sys.stderr)
    return EXIT_PASS if R.verdict else EXIT_FAIL


def cmd_hyper(args):
    if args.action == "model":
        H = model_hyperelliptic(args.genus, delta=args.delta)
        _dump(H.to_json(), args.out)
        return EXIT_PASS
    if args.action == "realize":
        H = model_hyperelliptic(args.genus, delta=args.delta)
        p = projection(H)
        hyper_certificate(p, args.samples, args.tol)
        f = hyper_pencil_from_divisor(H, alternating_divisor(H))
        hyper_certificate(f, args.samples, args.tol)
        _dump({"projection": p.to_json(), "alternating": f.to_json()}, args.out)
        return EXIT_PASS if p.certificate.ok and f.certificate.ok else EXIT_FAIL
    R = run_verify_hyper(args.genus, args.bound, _params(args), delta=args.delta)
    text = R.dumps()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"hyper verify g={args.genus}: {'pass' if R.verdict else 'fail'} ({R.runtime:.1f} s)",
          file=sys.stderr)
    return EXIT_PASS if R.verdict else EXIT_FAIL


def cmd_plot(args):
    from .svg import render_chart
    from .topology import trace_section
    from .algebra import MultiForm

    C, locus = _analyzed(args.curve, args.step)
    orientation = None
    if args.target:
        target = tuple(int(v) for v in args.target.split(","))
        R = realize_target(C, locus, target, n_samples=args.samples, seed=args.seed)
        if not R.ok:
            raise MorphismError(f"target {target} not certified")
        orientation = complex_orientation(locus, R.morphism)

    def traced(planes):
        out = []
        for plane in planes or []:
            n = [float(v) for v in plane.split(",")]
            if len(n) != 4:
                raise ValueError("a plane needs 4 coefficients")
            out += trace_section(C.quadric, MultiForm.linear(n), step=args.step)
        return out

    svg = render_chart(C.quadric, locus.loops, sections=traced(args.section),
                       aux_sections=traced(args.aux), orientation=orientation)
    with open(args.out or "locus.svg", "w") as fh:
        fh.write(svg)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-6, help="imaginary-part tolerance")
    common.add_argument("--step", type=float, default=0.01, help="tracing step")
    common.add_argument("--samples", type=int, default=200, help="fiber samples per certificate")
    common.add_argument("--seed", type=int, default=default_seed(),
                        help="random seed (default: $SEPSEMI_SEED or 0)")
    common.add_argument("--out", help="write output to this file")

    p = argparse.ArgumentParser(prog="sepsemi", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("classify", parents=[common], help="classify a real quadric")
    s.add_argument("matrix", help="16 comma-separated entries, row major")
    s.set_defaults(func=cmd_classify)

    for name, fn, hlp in (("model", cmd_model, "build a model sextic"),
                          ("verify-table", cmd_verify_table, "verify one table row")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("kind", choices=["ellipsoid", "hyperboloid", "cone"])
        s.add_argument("r", type=int)
        s.add_argument("l", type=int)
        s.add_argument("--epsilon", type=float, default=None)
        if name == "verify-table":
            s.add_argument("--bound", type=int, default=8)
        s.set_defaults(func=fn)

    s = sub.add_parser("analyze", parents=[common], help="smoothness and topology of a curve file")
    s.add_argument("curve")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("realize", parents=[common], help="certify a degree vector on a curve file")
    s.add_argument("curve")
    s.add_argument("--target", required=True, help="comma-separated degree vector")
    s.set_defaults(func=cmd_realize)

    s = sub.add_parser("hyper", parents=[common], help="hyperelliptic curves y^2 = F(x)")
    s.add_argument("action", choices=["model", "realize", "verify"])
    s.add_argument("genus", type=int)
    s.add_argument("--delta", type=float, default=0.1)
    s.add_argument("--bound", type=int, default=10)
    s.set_defaults(func=cmd_hyper)

    s = sub.add_parser("plot", parents=[common], help="SVG of the real locus in the chart")
    s.add_argument("curve")
    s.add_argument("--target", help="orient loops by a certified morphism of this degree vector")
    s.add_argument("--section", action="append",
                   help="plane (4 comma-separated coefficients) drawn as a solid section")
    s.add_argument("--aux", action="append", help="plane drawn as a dashed auxiliary section")
    s.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_PASS
    try:
        return args.func(args)
    except (TracingError, TopologyError, MorphismError, np.linalg.LinAlgError,
            FloatingPointError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ModelError, ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
