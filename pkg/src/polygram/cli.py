"""Command-line interface.

Exit codes
----------
0   success (``classify``: real-factorable)
1   unreadable or malformed input, empty scan grid, or no scan row completed
2   bad dimensions or sampling failure
3   validation failure (representation invalid, Gramian not real, round trip mismatch)
4   Gramian of the input factor is not real
5   rank or spectrum failure, non-skew input
6   skew equation infeasible
10  ``classify``: complex-only (no real spectral factor)
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import conjecture, factor, hrep, polymat
from .exceptions import PolygramError
from .tolerances import from_environment

EXIT_COMPLEX_ONLY = 10


class InputError(PolygramError):
    exit_code = 1


def _dump(obj):
    return json.dumps(obj, indent=2) + "\n"


def _write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _read_factor(path):
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a polynomial matrix object")
    try:
        return polymat.PolyMatrix.from_dict(data)
    except PolygramError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _read_matrix(path):
    data = _read_json(path)
    if isinstance(data, dict):
        data = data.get("matrix")
    try:
        M = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a numeric matrix ({exc})") from exc
    if M.ndim != 2:
        raise InputError(f"{path}: expected a 2-D matrix, got shape {M.shape}")
    return M


def _manifest(args, config, started):
    return {
        "command": args.command,
        "config": config,
        "seed": config.get("seed"),
        "version": __version__,
        "tolerance_scale": args.tol_scale,
        "started": started,
        "finished": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }


def _now():
    return time.strftime("%Y-%m-%dT%H:%M:%S%z")


def cmd_generate(args, tol):
    started = _now()
    h = hrep.sample(args.d, args.N, args.P, seed=args.seed, scale=args.scale, tol=tol)
    report = hrep.validate(h, tol)
    X = polymat.PolyMatrix(hrep.mix(h.W, h.R))
    G = polymat.gram(X)
    real, max_imag = polymat.is_real(G, tol.real)
    out = Path(args.out)
    _write(out / "hrep.json", _dump(h.to_dict()))
    _write(out / "factor.json", _dump(X.to_dict()))
    _write(out / "gram.json", _dump(G.to_dict()))
    config = {"d": args.d, "N": args.N, "P": args.P, "seed": args.seed, "scale": args.scale}
    _write(out / "manifest.json", _dump(_manifest(args, config, started)))
    print(f"constraint residual {report.constraint_residual:.3e}; "
          f"max |Im B_k| = {max_imag:.3e} ({'real' if real else 'NOT real'})")
    if not report.passed:
        print("validation failed: " + "; ".join(report.failures), file=sys.stderr)
        return 3
    if not real:
        print(f"Gramian is not real: max imaginary part {max_imag:.3e}", file=sys.stderr)
        return 3
    return 0


def cmd_classify(args, tol):
    X = _read_factor(args.factor)
    c = factor.classify(X, tol)
    _write(args.out, _dump(c.to_dict()))
    print(f"{c.verdict.value}: w_norm = {c.w_norm:.3e} (threshold {tol.classify:.1e})")
    return 0 if c.is_real_factorable else EXIT_COMPLEX_ONLY


def cmd_recover(args, tol):
    X = _read_factor(args.factor)
    h = factor.recover_hrep(factor.canonicalize_factor(X, tol), tol)
    report = hrep.validate(h, tol)
    _write(args.out, _dump(h.to_dict()))
    max_w = max((np.linalg.norm(Wk) for Wk in h.W), default=0.0)
    print(f"recovered d={h.d} N={h.N} P={h.P}; max ||W_k|| = {max_w:.3e}; "
          f"constraint residual {report.constraint_residual:.3e}")
    if not report.passed:
        print("validation failed: " + "; ".join(report.failures), file=sys.stderr)
        return 3
    return 0


def cmd_roundtrip(args, tol):
    h = hrep.sample(args.d, args.N, args.P, seed=args.seed, scale=args.scale, tol=tol)
    X = hrep.to_factor(h, tol)
    back = factor.recover_hrep(factor.canonicalize_factor(X, tol), tol)
    ref = hrep.canonicalize_hrep(h, tol)
    dist = back.distance(ref)
    print(f"round trip distance {dist:.3e} (limit {args.limit:.1e})")
    if args.out:
        out = Path(args.out)
        _write(out / "hrep.json", _dump(ref.to_dict()))
        _write(out / "recovered.json", _dump(back.to_dict()))
    return 0 if dist <= args.limit else 3


def _scan_config(args):
    if args.config:
        raw = _read_json(args.config)
        if not isinstance(raw, dict):
            raise InputError(f"{args.config}: expected an object")
        if "grid" in raw:
            kw = {k: raw[k] for k in ("trials", "seed", "fd_step", "rank_tol", "scale") if k in raw}
            return conjecture.ScanConfig(grid=raw["grid"], workers=args.workers, **kw)
        ds, Ps, Ns = raw.get("d", []), raw.get("P", []), raw.get("N", [])
        kw = {k: raw[k] for k in ("trials", "seed", "fd_step", "rank_tol", "scale") if k in raw}
        return conjecture.ScanConfig.from_ranges(ds, Ps, Ns, workers=args.workers, **kw)
    return conjecture.ScanConfig.from_ranges(
        args.d, args.P, args.N, trials=args.trials, seed=args.seed, fd_step=args.fd_step,
        rank_tol=args.rank_tol, scale=args.scale, workers=args.workers)


def _margin_table(rows):
    lines = [f"{'d':>3} {'P':>3} {'N':>3}  {'dimC':>5} {'rankC':>5} {'dimR':>5} {'rankR':>5} {'margin':>6}  agree  flags"]
    for r in rows:
        cells = [r.chart_dim_C, r.image_rank_C, r.chart_dim_R, r.image_rank_R, r.margin]
        c = ["-" if v is None else str(v) for v in cells]
        lines.append(f"{r.d:>3} {r.P:>3} {r.N:>3}  {c[0]:>5} {c[1]:>5} {c[2]:>5} {c[3]:>5} {c[4]:>6}"
                     f"  {r.agreement:>2}/{r.trials:<2}  {';'.join(r.flags)}")
    return "\n".join(lines)


def cmd_scan(args, tol):
    started = _now()
    cfg = _scan_config(args)
    if not cfg.grid:
        print("empty scan grid", file=sys.stderr)
        return 1
    rows = conjecture.scan(cfg)
    _write(args.out, conjecture.to_csv(rows))
    _write(str(args.out) + ".manifest.json", _dump(_manifest(args, cfg.to_dict(), started)))
    print(_margin_table(rows))
    return 0 if any(r.completed for r in rows) else 1


def cmd_solve_skew(args, tol):
    A = _read_matrix(args.A)
    C = _read_matrix(args.C)
    X = factor.solve_skew_particular(A, C, tol.real)
    res = factor.skew_residual(X, A, C)
    d = A.shape[0]
    family = f"X = W A + X_particular for any symmetric {d}x{d} W"
    _write(args.out, _dump({"X": X.tolist(), "residual": res, "family": family}))
    print(f"residual {res:.3e}; all solutions: {family}")
    return 0


def _int_list(text):
    out = []
    for part in text.split(","):
        if "-" in part.strip()[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part.strip():
            out.append(int(part))
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="polygram", description=__doc__.splitlines()[0])
    p.add_argument("--tol", dest="tol_scale", type=float, default=None,
                   help="multiply every default tolerance by this factor (env POLYGRAM_TOL)")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def sizes(sp):
        sp.add_argument("--d", type=int, required=True)
        sp.add_argument("--N", type=int, required=True)
        sp.add_argument("--P", type=int, required=True)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--scale", type=float, default=1.0)

    g = sub.add_parser("generate", help="sample a representation and write hrep/factor/gram JSON")
    sizes(g)
    g.add_argument("--out", default=".", help="output directory")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("classify", help="decide whether a factor's Gramian has a real factor")
    c.add_argument("factor")
    c.add_argument("--out", default="classification.json")
    c.set_defaults(func=cmd_classify)

    r = sub.add_parser("recover", help="canonicalize a factor and recover its representation")
    r.add_argument("factor")
    r.add_argument("--out", default="hrep.json")
    r.set_defaults(func=cmd_recover)

    rt = sub.add_parser("roundtrip", help="generate, recover and compare in one step")
    sizes(rt)
    rt.add_argument("--limit", type=float, default=1e-7)
    rt.add_argument("--out", default=None)
    rt.set_defaults(func=cmd_roundtrip)

    s = sub.add_parser("scan", help="local dimension scan of real vs complex-only strata")
    s.add_argument("--config", default=None, help="JSON config with grid or d/P/N lists")
    s.add_argument("--d", type=_int_list, default=[1], help="e.g. 1,2 or 1-2")
    s.add_argument("--P", type=_int_list, default=[1])
    s.add_argument("--N", type=_int_list, default=[2, 3, 4])
    s.add_argument("--trials", type=int, default=4)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--fd-step", type=float, default=conjecture.FD_STEP)
    s.add_argument("--rank-tol", type=float, default=conjecture.JAC_RANK_TOL)
    s.add_argument("--scale", type=float, default=1.0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", default="scan.csv")
    s.set_defaults(func=cmd_scan)

    k = sub.add_parser("solve-skew", help="solve X^T A - A^T X = C")
    k.add_argument("A")
    k.add_argument("C")
    k.add_argument("--out", default="solution.json")
    k.set_defaults(func=cmd_solve_skew)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = from_environment(args.tol_scale)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args, tol)
    except PolygramError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
