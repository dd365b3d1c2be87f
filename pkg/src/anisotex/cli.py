"""Command-line front end.

Subcommands: ``simulate`` (write an ANIF field), ``scan`` (anisotropy
scan of the critical exponent), ``analyze`` (structure functions and
directional exponents), ``hywave`` (hyperbolic wavelet statistics and
ratio scan), ``selftest`` (fast built-in checks).

Exit codes: 0 success, 1 internal or numerical failure, 2 usage or
domain error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import besov, fileio, homog, hywave, synth
from .core import AnisotropyError, FieldSpec


def _parse_alpha_grid(text):
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise ValueError(f"bad alpha grid {text!r}; expected start:stop:step") from None
    if step <= 0:
        raise ValueError(f"alpha grid step must be positive, got {step}")
    if not start < stop:
        return []
    grid = list(np.arange(start, stop + step * 1e-6, step))
    return [round(a, 12) for a in grid]


def _parse_p(text):
    if text.lower() in ("inf", "infinity"):
        return math.inf
    p = float(text)
    if p < 1:
        raise ValueError(f"order p must be >= 1 or inf, got {p}")
    return p


def _parse_spec(text, size=None, seed=None):
    kv = {}
    for part in text.split(","):
        key, _, val = part.partition("=")
        kv[key.strip()] = val.strip()
    try:
        alpha0 = float(kv.pop("alpha0"))
        hurst = float(kv.pop("hurst"))
    except KeyError as e:
        raise ValueError(f"--spec needs alpha0=..,hurst=..: missing {e}") from None
    n = int(kv.pop("n", kv.pop("grid_n", size if size is not None else 256)))
    sd = int(kv.pop("seed", seed if seed is not None else 0))
    if kv:
        raise ValueError(f"unknown keys in --spec: {sorted(kv)}")
    return FieldSpec.make(alpha0, hurst, grid_n=n, seed=sd)


def cmd_simulate(args) -> int:
    spec = FieldSpec.make(args.alpha0, args.hurst, grid_n=args.size, seed=args.seed)
    field = synth.synthesize(spec)
    fileio.write_field(args.out, field)
    print(json.dumps(fileio.spec_to_dict(spec)))
    return 0


def _load_fields(paths):
    fields = [fileio.read_field(p) for p in paths]
    ref = fields[0].spec
    for f, p in zip(fields[1:], paths[1:]):
        s = f.spec
        if (s.anisotropy, s.hurst, s.rho, s.grid_n) != (ref.anisotropy, ref.hurst, ref.rho, ref.grid_n):
            raise ValueError(f"mixed-spec inputs: {p} disagrees with {paths[0]}")
    return fields


def cmd_scan(args) -> int:
    grid = _parse_alpha_grid(args.alpha_grid)
    if not grid:
        raise ValueError(f"empty grid {args.alpha_grid!r}")
    if args.inputs:
        fields = _load_fields(args.inputs)
    elif args.spec:
        spec = _parse_spec(args.spec)
        fields = synth.synthesize_ensemble(spec, args.reps)
    else:
        raise ValueError("provide field files with --in or a --spec with --reps")
    scan = besov.scan_anisotropy(fields, grid, args.p)
    fileio.write_scan(args.out + ".csv", scan)
    spec = fields[0].spec
    inside = [(a, e) for a, e in zip(scan.alphas, scan.exponents) if 0.3 <= a <= 1.7]
    tent_rms = math.sqrt(np.mean([
        (e - besov.tent_prediction(a, spec.alpha0, spec.hurst)) ** 2 for a, e in inside
    ])) if inside else None
    summary = {
        "argmax_alpha": scan.argmax_alpha,
        "peak": scan.peak,
        "p": args.p,
        "realizations": len(fields),
        "true_alpha0": spec.alpha0,
        "true_hurst": spec.hurst,
        "tent_rms": tent_rms,
    }
    fileio.write_json(args.out + ".json", summary)
    print(json.dumps(summary))
    return 0


def cmd_analyze(args) -> int:
    field = fileio.read_field(args.inputs[0]) if len(args.inputs) == 1 else None
    if field is None:
        raise ValueError("analyze expects exactly one --in field file")
    directions = []
    for d in args.direction or ["1,0", "0,1"]:
        u, v = (float(c) for c in d.split(","))
        directions.append((u, v))
    sfs = []
    exponents = {}
    warnings = 0
    for d in directions:
        sf = besov.structure_function(field, d, args.p)
        sfs.append(sf)
        key = f"{sf.lattice_step[0]},{sf.lattice_step[1]}"
        try:
            de = besov.directional_exponent(sf)
            exponents[key] = {"h": de.h, "stderr": de.stderr, "fit_range": list(de.fit_range)}
        except besov.DegenerateDirectionError as e:
            exponents[key] = {"error": str(e)}
            print(f"warning: direction {key}: {e}", file=sys.stderr)
            warnings += 1
    fileio.write_structure_functions(args.out + ".csv", sfs)
    fileio.write_json(args.out + ".json", exponents)
    print(json.dumps(exponents))
    return 0


def cmd_hywave(args) -> int:
    field = fileio.read_field(args.input)
    levels = None
    if args.levels is not None:
        levels = (args.levels, args.levels)
    pyr = hywave.hyperbolic_transform(field, filt=args.filter, levels=levels)
    stats = hywave.scale_statistics(pyr, args.p)
    scan = hywave.ratio_maximize(stats)
    fileio.write_scale_statistics(args.out + "_stats.csv", stats)
    fileio.write_ratio_scan(args.out + "_ratio.csv", scan)
    summary = {"best_ratio": scan.best_ratio, "implied_alpha0": scan.implied_alpha0,
               "slope_at_best": scan.slope_at_best}
    fileio.write_json(args.out + ".json", summary)
    print(json.dumps(summary))
    return 0


def cmd_selftest(args) -> int:
    failures = 0

    def check(name, ok):
        nonlocal failures
        print(("PASS" if ok else "FAIL") + f" {name}")
        if not ok:
            failures += 1

    rep = homog.check_homogeneity(homog.rho_power_sum(0.6), trials=1000)
    check("homogeneity", rep.max_relative_error <= 1e-10)

    spec = FieldSpec.make(0.6, 0.4, grid_n=64, seed=11)
    f1 = synth.synthesize(spec)
    second = spec if not args.debug_break_determinism else spec.with_seed(spec.seed + 1)
    f2 = synth.synthesize(second)
    check("determinism", bool(np.array_equal(f1.values, f2.values)))
    check("zero_at_origin", f1.values[0, 0] == 0.0)

    rng = np.random.Generator(np.random.Philox(key=3))
    noise = rng.standard_normal((64, 64))
    noise[0, 0] = 0.0
    ok = True
    for filt in ("haar", "d4"):
        pyr = hywave.hyperbolic_transform(noise, filt=filt, levels=(4, 4))
        rec = hywave.inverse_hyperbolic_transform(pyr)
        ok = ok and float(np.max(np.abs(rec - noise))) < 1e-9
    check("reconstruction", ok)

    if not args.quick:
        tspec = FieldSpec.make(0.6, 0.4, grid_n=256, seed=7)
        fields = synth.synthesize_ensemble(tspec, 4)
        grid = [round(0.2 + 0.05 * i, 10) for i in range(33)]
        scan = besov.scan_anisotropy(fields, grid, 2.0)
        check("tent_argmax", abs(scan.argmax_alpha - 0.6) <= 0.12)
        check("tent_peak", abs(scan.peak - 0.4) <= 0.08)

    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="anisotex",
                                 description="Anisotropic self-similar texture toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="synthesize a field and write an ANIF file")
    sim.add_argument("--alpha0", type=float, required=True)
    sim.add_argument("--hurst", type=float, required=True)
    sim.add_argument("--size", type=int, default=256)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=cmd_simulate)

    sc = sub.add_parser("scan", help="scan analysis anisotropies for the critical exponent")
    sc.add_argument("--in", dest="inputs", action="append", default=[],
                    help="ANIF field file (repeatable)")
    sc.add_argument("--spec", help="alpha0=..,hurst=..[,n=..,seed=..] for in-memory synthesis")
    sc.add_argument("--reps", type=int, default=8)
    sc.add_argument("--p", type=_parse_p, default=2.0)
    sc.add_argument("--alpha-grid", default="0.2:1.8:0.05")
    sc.add_argument("--out", required=True, help="output prefix (.csv and .json)")
    sc.set_defaults(func=cmd_scan)

    an = sub.add_parser("analyze", help="structure functions and directional exponents")
    an.add_argument("--in", dest="inputs", action="append", required=True)
    an.add_argument("--p", type=_parse_p, default=2.0)
    an.add_argument("--direction", action="append", help="u,v (repeatable)")
    an.add_argument("--out", required=True, help="output prefix (.csv and .json)")
    an.set_defaults(func=cmd_analyze)

    hw = sub.add_parser("hywave", help="hyperbolic wavelet statistics and ratio scan")
    hw.add_argument("--in", dest="input", required=True)
    hw.add_argument("--filter", choices=sorted(hywave.FILTERS), default="d4")
    hw.add_argument("--p", type=_parse_p, default=2.0)
    hw.add_argument("--levels", type=int, default=None)
    hw.add_argument("--out", required=True, help="output prefix")
    hw.set_defaults(func=cmd_hywave)

    st = sub.add_parser("selftest", help="run the fast built-in checks")
    st.add_argument("--quick", action="store_true", help="skip the tent check")
    st.add_argument("--debug-break-determinism", action="store_true",
                    help=argparse.SUPPRESS)
    st.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, AnisotropyError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # numerical or internal failure
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
