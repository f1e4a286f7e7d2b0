"""JSON command-line interface.

Exit codes: 0 success, 1 checks failed (report still written), 2 bad input,
3 guard rail hit.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .census import Census, GuardRailError, compare, enumerate_curves, oracle_enumerate
from .chunk import DecompositionError, build_chunks, verify_decomposition
from .curve import CurveError, UnresolvableAtCurveLevel, label, normalize, parse_pattern, validate_pattern, weight
from .diagram import WgadParseError, parse_wgad, validate_wga
from .fixtures import FIXTURES, fixture_text
from .oracle import OracleLimitError
from .patterns import TAGS
from .surface import SurfaceError, canonical_strip, complex_from_file, complexes_equivalent

OK, FAILED, BAD_INPUT, GUARD = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _clean(obj):
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_clean(v) for v in obj)
    return obj


def _emit(data, args, stream=None) -> None:
    pretty = getattr(args, "pretty", False)
    text = json.dumps(_clean(data), indent=2 if pretty else None, sort_keys=True)
    out = getattr(args, "output", None)
    if out:
        Path(out).write_text(text + "\n")
    else:
        (stream or sys.stdout).write(text + "\n")


def _diagram_text(source: str) -> str:
    p = Path(source)
    if p.is_file():
        return p.read_text()
    if source in FIXTURES:
        return fixture_text(source)
    raise InputError(f"no such diagram file or fixture: {source}")


def _load_diagram(source: str):
    return parse_wgad(_diagram_text(source))


def _load_pattern(source: str):
    if source == "-":
        return parse_pattern(sys.stdin.read())
    p = Path(source)
    if p.is_file():
        return parse_pattern(p.read_text())
    if "face:" in source:
        return parse_pattern(source)
    raise InputError(f"no such pattern file: {source}")


def _load_json(source: str) -> dict:
    p = Path(source)
    if not p.is_file():
        raise InputError(f"no such file: {source}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise InputError(f"{source}: invalid JSON ({e})") from None


def _chunks(args):
    d = _load_diagram(args.diagram)
    try:
        return build_chunks(d, force=args.force)
    except DecompositionError as e:
        report = validate_wga(d).to_json()
        raise _Failure({"error": {"type": "DecompositionError", "message": str(e)}, "wga": report}) from None


class _Failure(Exception):
    """A check failed; the payload is still written."""

    def __init__(self, payload):
        super().__init__("check failed")
        self.payload = payload


# -- subcommands -----------------------------------------------------------------


def cmd_validate(args):
    d = _load_diagram(args.diagram)
    rep = validate_wga(d)
    out = {"diagram": d.name, **rep.to_json()}
    return out, OK if rep.ok else FAILED


def cmd_chunks(args):
    cd = _chunks(args)
    checks = verify_decomposition(cd)
    return {"decomposition": cd.to_json(), "verification": checks}, OK if checks["ok"] else FAILED


def cmd_label(args):
    cd = _chunks(args)
    p = _load_pattern(args.pattern)
    w = label(p, cd, meridianal_mode=args.meridianal)
    return {"word": w.letters, "canonical": w.canonical(), "provenance": list(w.provenance),
            "weight": weight(p, cd)}, OK


def cmd_normalize(args):
    cd = _chunks(args)
    p = _load_pattern(args.pattern)
    validate_pattern(p, cd)
    w0 = weight(p, cd)
    try:
        q, trace = normalize(p, cd)
    except UnresolvableAtCurveLevel as e:
        return {"status": "unresolvable at curve level", "violation": e.violation,
                "pattern": e.pattern.to_text() if e.pattern is not None else None, "trace": e.trace}, FAILED
    return {"status": "normal", "input": p.to_text(), "output": q.to_text() if q.arcs else "",
            "removed": not q.arcs, "weight_before": w0, "weight_after": weight(q, cd) if q.arcs else 0,
            "trace": trace}, OK


def cmd_census(args):
    cd = _chunks(args)
    c = enumerate_curves(cd, args.max_letters, args.disable_filter, allow_large=args.allow_large)
    out = c.to_json()
    code = OK
    if args.oracle_check:
        o = oracle_enumerate(cd, args.max_letters, args.disable_filter, allow_large=args.allow_large)
        diff = compare(c, o)
        out["oracle_check"] = diff.to_json() | {"oracle_digest": o.digest}
        if not diff.empty:
            code = FAILED
    return out, code


def cmd_oracle(args):
    cd = _chunks(args)
    return oracle_enumerate(cd, args.max_letters, args.disable_filter, allow_large=args.allow_large).to_json(), OK


def cmd_compare(args):
    a = Census.from_json(_load_json(args.a))
    b = Census.from_json(_load_json(args.b))
    try:
        diff = compare(a, b)
    except ValueError as e:
        raise InputError(str(e)) from None
    return diff.to_json(), OK if diff.empty else FAILED


def _complex(source: str, diagram: str | None, force: bool):
    data = _load_json(source)
    if diagram:
        text = _diagram_text(diagram)
    elif "wgad" in data:
        text = data["wgad"]
    elif "fixture" in data:
        text = _diagram_text(data["fixture"])
    else:
        raise InputError(f"{source}: no diagram given (use --diagram, or a 'wgad' or 'fixture' key)")
    try:
        cd = build_chunks(parse_wgad(text), force=force)
    except DecompositionError as e:
        raise _Failure({"error": {"type": "DecompositionError", "message": str(e)}}) from None
    return complex_from_file(data, cd)


def cmd_strip(args):
    x = _complex(args.complex, args.diagram, args.force)
    s = canonical_strip(x)
    return {"input": x.to_json(), "stripped": s.to_json()}, OK


def cmd_compare_complex(args):
    a = _complex(args.a, args.diagram, args.force)
    b = _complex(args.b, args.diagram, args.force)
    eq = complexes_equivalent(a, b)
    verdict = "combinatorially equivalent (isotopic after stripping)" if eq else "not equivalent"
    return {"equivalent": eq, "verdict": verdict}, OK if eq else FAILED


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="indent the JSON output")
    common.add_argument("--output", metavar="PATH", help="write JSON here instead of stdout")
    gated = _Parser(add_help=False)
    gated.add_argument("--force", action="store_true", help="skip the WGA gate")
    search = _Parser(add_help=False)
    search.add_argument("--max-letters", type=int, default=4)
    search.add_argument("--disable-filter", action="append", default=[], choices=TAGS, metavar="TAG",
                        help="turn off one filter tag (repeatable): " + ", ".join(TAGS))
    search.add_argument("--allow-large", action="store_true", help="lift the size guard rails")

    p = _Parser(prog="wga-chunks", description="Chunk decompositions of weakly generalized alternating diagrams")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    s = sub.add_parser("validate", parents=[common], help="check the six WGA conditions")
    s.add_argument("diagram")
    s.set_defaults(func=cmd_validate)
    s = sub.add_parser("chunks", parents=[common, gated], help="emit the chunk decomposition")
    s.add_argument("diagram")
    s.set_defaults(func=cmd_chunks)
    for name, func, extra in (("label", cmd_label, True), ("normalize", cmd_normalize, False)):
        s = sub.add_parser(name, parents=[common, gated])
        s.add_argument("diagram")
        s.add_argument("pattern", help="pattern file, '-' for stdin, or inline text")
        if extra:
            s.add_argument("--meridianal", action="store_true", help="read truncation traversals as P")
        s.set_defaults(func=func)
    s = sub.add_parser("census", parents=[common, gated, search], help="enumerate boundary curves")
    s.add_argument("diagram")
    s.add_argument("--oracle-check", action="store_true", help="also run the brute-force oracle and diff")
    s.set_defaults(func=cmd_census)
    s = sub.add_parser("oracle", parents=[common, gated, search], help="brute-force census")
    s.add_argument("diagram")
    s.set_defaults(func=cmd_oracle)
    s = sub.add_parser("compare", parents=[common], help="diff two census files")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_compare)
    s = sub.add_parser("strip", parents=[common, gated], help="strip BBBB/BBSS disk collections")
    s.add_argument("complex")
    s.add_argument("--diagram")
    s.set_defaults(func=cmd_strip)
    s = sub.add_parser("compare-complex", parents=[common, gated], help="compare two complexes after stripping")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--diagram")
    s.set_defaults(func=cmd_compare_complex)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = argparse.Namespace()
    try:
        args = parser.parse_args(argv)
        data, code = args.func(args)
    except _Failure as f:
        _emit(f.payload, args)
        return FAILED
    except (GuardRailError, OracleLimitError) as e:
        _emit({"error": {"type": "GuardRail", "message": str(e)}}, args)
        return GUARD
    except (InputError, WgadParseError, CurveError, SurfaceError, ValueError, KeyError, OSError) as e:
        _emit({"error": {"type": type(e).__name__, "message": str(e)}}, args)
        return BAD_INPUT
    _emit(data, args)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
