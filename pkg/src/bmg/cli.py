"""Command-line interface: ``bmg <subcommand> ...``.

Exit codes: 0 success, 1 refusal (reason as JSON on stderr), 2 internal
error, 64 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import Refusal, kl_table, smooth_locus, tilting_character
from .analysis.kl import poly_str
from .builders import CartanMatrix, affine_grassmannian_graph, finite_bruhat_graph
from .engine import BMSheaf, braden_macpherson, decompose, default_window, sections, verify_bm_axioms
from .graded import A4bViolation, DegreeBoundError
from .graph import GraphValidationError, MomentGraph, gkm_check
from .scalars import parse_coeff

EXIT_OK, EXIT_REFUSED, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def cache_dir() -> Path:
    return Path(os.environ.get("BMG_CACHE_DIR") or Path.home() / ".cache" / "bmg")


def _write(path, text: str):
    if path:
        Path(path).write_text(text)


def _emit(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=1) + "\n")


def _load_graph(path) -> MomentGraph:
    return MomentGraph.from_json(json.loads(Path(path).read_text()))


def _load_sheaf(path) -> BMSheaf:
    return BMSheaf.from_json(json.loads(Path(path).read_text()))


def _window(text):
    if text is None:
        return None
    a, b = (int(x) for x in text.replace(" ", "").split(","))
    return (a, b)


def _ints(text):
    return [int(x) for x in text.replace(",", " ").split()] if text else []


# --- subcommands -----------------------------------------------------------


def cmd_build(a):
    if a.type == "finite":
        if not a.cartan:
            raise UsageError("build --type finite needs --cartan")
        A = CartanMatrix.parse(a.cartan)
        top = _ints(a.top) if a.top is not None else None
        G = finite_bruhat_graph(A, top, parabolic=_ints(a.parabolic))
    elif a.type == "affine-gr":
        if not a.cartan or a.cutoff is None:
            raise UsageError("build --type affine-gr needs --cartan and --cutoff")
        comp = _ints(a.component) if a.component else None
        G = affine_grassmannian_graph(CartanMatrix.parse(a.cartan), a.cutoff, component=comp)
    else:
        if not a.input:
            raise UsageError("build --type file needs --in")
        G = _load_graph(a.input)
    text = json.dumps(G.to_json(), sort_keys=True, indent=1) + "\n"
    _write(a.out, text)
    _emit({"vertices": len(G.vertices), "edges": len(G.edges), "out": a.out, "output_hash": sha256(text)})


def cmd_gkm(a):
    G = _load_graph(a.graph)
    _emit(gkm_check(G, parse_coeff(a.coeff)).to_json())


def cmd_bm(a):
    G = _load_graph(a.graph)
    k = parse_coeff(a.coeff)
    if a.top not in G.vertices:
        raise Refusal({"message": "unknown vertex", "vertex": a.top})
    window = _window(a.window) or default_window(G, a.top)
    manifest = {
        "subcommand": "bm",
        "graph_hash": sha256(G.dumps()),
        "coeff": k.flag(),
        "top": a.top,
        "window": list(window),
        "version": __version__,
    }
    key = sha256(canonical(manifest))
    path = cache_dir() / f"{key}.json"
    status = "miss"
    text = None
    if not a.no_cache and path.exists():
        text = path.read_text()
        status = "hit"
    if text is None:
        S = braden_macpherson(G, k, a.top, window=window, jobs=a.jobs)
        text = S.dumps() + "\n"
        if not a.no_cache:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text(text)
            tmp.replace(path)
    _write(a.out, text)
    data = json.loads(text)
    manifest["output_hash"] = sha256(text)
    _emit({"manifest": manifest, "cache": status, "out": a.out, "stalks": data["stalks"]})


def cmd_sections(a):
    S = _load_sheaf(a.sheaf)
    opens = [v for v in a.open.replace(",", " ").split()] if a.open else list(S.graph.vertices)
    try:
        M = sections(S, opens)
    except ValueError as e:
        raise Refusal({"message": str(e), "open": opens})
    out = {"open": sorted(opens), "generators": {str(k): v for k, v in sorted(M.generator_polynomial().items())},
           "ranks": {str(k): v for k, v in sorted(M.hilbert().items())}}
    _emit(out)


def cmd_smooth(a):
    G = _load_graph(a.graph)
    k = parse_coeff(a.coeff)
    if a.top not in G.vertices:
        raise Refusal({"message": "unknown vertex", "vertex": a.top})
    rep = smooth_locus(G, k, a.top, a.method, a.l)
    _emit(rep.to_json())


def cmd_kl(a):
    T = kl_table(CartanMatrix.parse(a.cartan), _ints(a.top) if a.top else None)
    if a.format == "tsv":
        sys.stdout.write(T.to_tsv())
    else:
        _emit({k: poly_str(tuple(v)) for k, v in T.to_json().items()})


def cmd_tilt(a):
    lam = _ints(a.lam)
    T = tilting_character(CartanMatrix.parse(a.cartan), lam, a.p, force=a.force, jobs=a.jobs)
    if a.format == "tsv":
        sys.stdout.write(T.to_tsv())
    else:
        _emit(T.to_json())


def cmd_verify(a):
    S = _load_sheaf(a.sheaf)
    rep = verify_bm_axioms(S)
    if not rep.ok:
        raise Refusal({"message": "not a Braden-MacPherson sheaf", **rep.first})
    _emit(rep.to_json())


def cmd_decompose(a):
    S = _load_sheaf(a.sheaf)
    try:
        parts = decompose(S)
    except ValueError as e:
        raise Refusal({"message": str(e)})
    _emit({"summands": [{"vertex": w, "shift": l} for w, l in parts]})


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bmg", description="Braden-MacPherson sheaves on moment graphs.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="build a moment graph")
    b.add_argument("--type", choices=["finite", "affine-gr", "file"], required=True)
    b.add_argument("--cartan")
    b.add_argument("--top", help="reduced word, e.g. '1 2 1' (default: longest element)")
    b.add_argument("--cutoff", type=int)
    b.add_argument("--component", help="coweight representative of the Grassmannian component")
    b.add_argument("--parabolic", default="")
    b.add_argument("--in", dest="input")
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)

    g = sub.add_parser("gkm", help="GKM diagnostics")
    g.add_argument("--graph", required=True)
    g.add_argument("--coeff", required=True, help="Q, Fp:<p> or Zp:<p> (the p-local integers)")
    g.set_defaults(func=cmd_gkm)

    m = sub.add_parser("bm", help="compute B(w)")
    m.add_argument("--graph", required=True)
    m.add_argument("--coeff", required=True)
    m.add_argument("--top", required=True, help="vertex id")
    m.add_argument("--window", help="even bounds 'a,b'")
    m.add_argument("--out")
    m.add_argument("--jobs", type=int, default=1)
    m.add_argument("--no-cache", action="store_true")
    m.set_defaults(func=cmd_bm)

    s = sub.add_parser("sections", help="sections over an open set")
    s.add_argument("--sheaf", required=True)
    s.add_argument("--open", help="vertex ids, comma or space separated (default: all)")
    s.set_defaults(func=cmd_sections)

    sm = sub.add_parser("smooth", help="smooth locus")
    sm.add_argument("--graph", required=True)
    sm.add_argument("--coeff", required=True)
    sm.add_argument("--top", required=True)
    sm.add_argument("--method", choices=["stalks", "edges", "compare"], default="stalks")
    sm.add_argument("--l", type=int)
    sm.set_defaults(func=cmd_smooth)

    k = sub.add_parser("kl", help="Kazhdan-Lusztig polynomials")
    k.add_argument("--cartan", required=True)
    k.add_argument("--top")
    k.add_argument("--format", choices=["json", "tsv"], default="json")
    k.set_defaults(func=cmd_kl)

    t = sub.add_parser("tilt", help="tilting characters")
    t.add_argument("--cartan", required=True)
    t.add_argument("--p", type=int, required=True)
    t.add_argument("--lambda", dest="lam", required=True, help="dominant weight, fundamental coordinates")
    t.add_argument("--force", action="store_true", help="allow p <= h + 1")
    t.add_argument("--format", choices=["json", "tsv"], default="json")
    t.add_argument("--jobs", type=int, default=1)
    t.set_defaults(func=cmd_tilt)

    v = sub.add_parser("verify", help="check the BM axioms")
    v.add_argument("--sheaf", required=True)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("decompose", help="split a sheaf into shifted B(w)")
    d.add_argument("--sheaf", required=True)
    d.set_defaults(func=cmd_decompose)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError:
        return EXIT_USAGE
    except SystemExit as e:  # --help / --version
        return EXIT_OK if not e.code else EXIT_USAGE
    try:
        args.func(args)
    except UsageError as e:
        sys.stderr.write(f"bmg: {e}\n")
        return EXIT_USAGE
    except Refusal as e:
        sys.stderr.write(canonical(e.reason) + "\n")
        return EXIT_REFUSED
    except (GraphValidationError, A4bViolation, DegreeBoundError, ValueError, FileNotFoundError) as e:
        reason = {"message": str(e), "error": type(e).__name__}
        if isinstance(e, GraphValidationError):
            reason["problems"] = e.report.problems
        sys.stderr.write(canonical(reason) + "\n")
        return EXIT_REFUSED
    except Exception as e:  # noqa: BLE001
        sys.stderr.write(canonical({"message": str(e), "error": type(e).__name__, "internal": True}) + "\n")
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
