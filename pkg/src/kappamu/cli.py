"""Command-line front end.

Exit codes: 0 when every check passes, 1 on any failed check or refused
synthesis, 2 on I/O or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from .contact_core import fit_kappa_mu
from .errors import KappaMuError, NotNullity, ParseError, PreconditionFailed
from .exact_scalar import parse_scalar, serialize
from .frame_model import FrameModel, catalog, catalog_model, load_model, save_model
from .report import Report, axiom_dict, backend_context, kappa_mu_dict, prepare, verify_report
from .synthesis import (
    SynthesisParams,
    SynthesisResult,
    roundtrip_params,
    sasakianize,
    synthesize,
    tw_parallelize,
)

EXIT_OK, EXIT_FAIL, EXIT_IO = 0, 1, 2
CATALOG_PREFIX = "catalog:"


class InputError(Exception):
    """Unreadable or malformed input; maps to exit code 2."""


def _load(path: str) -> tuple[FrameModel, str]:
    if path.startswith(CATALOG_PREFIX):
        name = path[len(CATALOG_PREFIX):]
        try:
            return catalog_model(name), name
        except KeyError:
            raise InputError(f"{path}: no such catalog model") from None
    try:
        return load_model(path), Path(path).stem
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _failed_load_report(path: str, exc: KappaMuError, backend, tol) -> Report:
    """An invariant violation while loading is a verification failure, not an I/O error."""
    name = getattr(exc, "identity", type(exc).__name__)
    return Report(Path(path).stem, backend, tol,
                  [{"name": name, "passed": False, "witness": str(exc)}])


def _emit(args, payload, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True) if not isinstance(payload, str) else payload)
    else:
        print(text)


def _tol(args):
    return args.tolerance if args.backend == "float" else None


def _fitted_line(km: dict) -> str:
    parts = [f"{label} = {km[key]}" for label, key in (
        ("kappa", "kappa"), ("mu", "mu"), ("lambda", "lambda"), ("I_M", "boeckx")) if km[key] is not None]
    return ", ".join(parts) + f", class {km['class']}"


def _summary(rep: Report) -> str:
    lines = [f"{rep.model_id}: {'PASS' if rep.passed else 'FAIL'} ({rep.backend})"]
    for a in rep.failures:
        lines.append(f"  violated: {a['name']}" + (f" ({a['witness']})" if a.get("witness") else ""))
    if rep.error:
        lines.append(f"  error: {rep.error}")
    if rep.kappa_mu:
        lines.append("  " + _fitted_line(rep.kappa_mu))
    for key, p in rep.pang.items():
        lines.append(f"  Pang class of {key}: {p['class']}")
    if rep.not_kappa_mu:
        lines.append("  not a (kappa, mu)-space")
    for w in rep.warnings:
        lines.append(f"  warning: {w}")
    return "\n".join(lines)


# -- subcommands -------------------------------------------------------------------------


def cmd_catalog(args) -> int:
    entries = catalog()
    if args.filter:
        key, _, value = args.filter.partition("=")
        if key != "class" or not value:
            print(f"error: unsupported filter {args.filter!r} (use class=LABEL)", file=sys.stderr)
            return EXIT_IO
        entries = [e for e in entries if e.expected_class == value]
    if args.export:
        out = Path(args.export)
        try:
            out.mkdir(parents=True, exist_ok=True)
            for e in entries:
                save_model(e.model, out / f"{e.name}.json")
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    payload = [{"name": e.name, "class": e.expected_class,
                "params": {"c2": serialize(e.params[0]), "c3": serialize(e.params[1])}} for e in entries]
    text = "\n".join(f"{e.name:12s} {e.expected_class}" for e in entries)
    _emit(args, payload, text)
    return EXIT_OK


def _verify_one(path: str, backend: str, tol) -> Report | InputError:
    try:
        model, mid = _load(path)
    except InputError as exc:
        return exc
    except KappaMuError as exc:
        return _failed_load_report(path, exc, backend, tol)
    return verify_report(model, model_id=mid, backend=backend, tolerance=tol)


def cmd_verify(args) -> int:
    paths = list(args.paths)
    if args.all:
        d = Path(args.all)
        if not d.is_dir():
            print(f"error: {d}: not a directory", file=sys.stderr)
            return EXIT_IO
        paths += sorted(str(p) for p in d.glob("*.json"))
    if not paths:
        print("error: nothing to verify", file=sys.stderr)
        return EXIT_IO
    tol = _tol(args)
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(lambda p: _verify_one(p, args.backend, tol), paths))
    io_errors = [r for r in results if isinstance(r, InputError)]
    for e in io_errors:
        print(f"error: {e}", file=sys.stderr)
    reports = [r for r in results if isinstance(r, Report)]
    if args.json:
        payload = [r.to_dict() for r in reports]
        _emit(args, payload[0] if len(paths) == 1 and payload else payload, "")
    else:
        for r in reports:
            print(_summary(r))
    if io_errors:
        return EXIT_IO
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_classify(args) -> int:
    try:
        model, mid = _load(args.path)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KappaMuError as exc:
        rep = _failed_load_report(args.path, exc, args.backend, _tol(args))
        _emit(args, rep.to_dict(), _summary(rep))
        return EXIT_FAIL
    rep = verify_report(model, model_id=mid, backend=args.backend, tolerance=_tol(args))
    _emit(args, rep.to_dict(), _summary(rep))
    return EXIT_OK if rep.passed and rep.kappa_mu is not None else EXIT_FAIL


def _synthesis_block(res: SynthesisResult, output: str | None) -> dict:
    block = {
        "params": res.params.as_dict(),
        "checks": [axiom_dict(c) for c in res.checks],
        "output": output,
        "fitted": kappa_mu_dict(res.report) if res.report is not None else None,
    }
    return block


def _params_from_args(args) -> SynthesisParams | str:
    if args.a is not None or args.b is not None:
        if args.a is None or args.b is None:
            raise InputError("--a and --b must be given together")
        return SynthesisParams("ab", a=parse_scalar(args.a), b=parse_scalar(args.b))
    if args.c is not None:
        return SynthesisParams("c", c=parse_scalar(args.c))
    if args.sasakianize:
        return "sasakianize"
    if args.tw_parallel:
        return "tw_parallel"
    return "roundtrip"


def cmd_synthesize(args) -> int:
    modes = [args.a is not None or args.b is not None, args.c is not None,
             args.sasakianize, args.tw_parallel, args.roundtrip]
    if sum(bool(m) for m in modes) != 1:
        print("error: choose exactly one of --a/--b, --c, --sasakianize, --tw-parallel, --roundtrip",
              file=sys.stderr)
        return EXIT_IO
    try:
        model, mid = _load(args.path)
        params = _params_from_args(args)
    except (InputError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KappaMuError as exc:
        rep = _failed_load_report(args.path, exc, args.backend, _tol(args))
        _emit(args, rep.to_dict(), _summary(rep))
        return EXIT_FAIL

    tol = _tol(args)
    base = verify_report(model, model_id=mid, backend=args.backend, tolerance=tol)
    if not base.passed or base.kappa_mu is None:
        _emit(args, base.to_dict(), _summary(base))
        return EXIT_FAIL
    with backend_context(args.backend, args.tolerance):
        m = prepare(model, args.backend)
        try:
            report = fit_kappa_mu(m)
            if params == "sasakianize":
                res = sasakianize(m, report)
            elif params == "tw_parallel":
                res = tw_parallelize(m, report)
            elif params == "roundtrip":
                res = synthesize(m, roundtrip_params(report), report)
            else:
                res = synthesize(m, params, report)
        except (PreconditionFailed, NotNullity) as exc:
            hyp = getattr(exc, "hypothesis", type(exc).__name__)
            rep = replace(base, synthesis={"params": None, "checks": [
                {"name": hyp, "passed": False, "witness": str(exc)}], "output": None, "fitted": None})
            _emit(args, rep.to_dict(), _summary(rep) + f"\n  refused: {exc}")
            return EXIT_FAIL
    output = None
    if args.output:
        try:
            save_model(res.model, args.output)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        output = args.output
    rep = replace(base, synthesis=_synthesis_block(res, output),
                  warnings=tuple(base.warnings) + tuple(res.warnings))
    text = _summary(rep)
    text += f"\n  synthesized with {res.params.as_dict()}"
    if res.report is not None:
        text += "\n  result: " + _fitted_line(kappa_mu_dict(res.report))
    if output:
        text += f"\n  wrote {output}"
    _emit(args, rep.to_dict(), text)
    return EXIT_OK if rep.passed else EXIT_FAIL


# -- parser --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--backend", choices=("exact", "float"), default="exact")
    common.add_argument("--tolerance", type=float, default=1e-9,
                        help="zero threshold for the float backend (default 1e-9)")

    parser = argparse.ArgumentParser(
        prog="kappamu",
        description="Verify, classify and synthesize contact metric (kappa, mu)-structures on frame models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", parents=[common], help="list the built-in models")
    p.add_argument("--filter", help="e.g. class=IV")
    p.add_argument("--export", metavar="DIR", help="write every listed model as a JSON file")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("verify", parents=[common], help="run the axiom and identity suite")
    p.add_argument("paths", nargs="*", help="model files (or catalog:NAME)")
    p.add_argument("--all", metavar="DIR", help="verify every *.json file in DIR")
    p.add_argument("--jobs", type=int, default=4, help="worker threads for batch mode")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", parents=[common], help="fit (kappa, mu) and report the class")
    p.add_argument("path")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("synthesize", parents=[common], help="build a new compatible structure")
    p.add_argument("path")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--c")
    p.add_argument("--sasakianize", action="store_true")
    p.add_argument("--tw-parallel", action="store_true")
    p.add_argument("--roundtrip", action="store_true")
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(func=cmd_synthesize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
