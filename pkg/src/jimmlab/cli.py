"""``jimmlab <command> --manifest file.json [--out dir] [--heavy]``

Exit codes: 0 success, 1 manifest schema violation, 2 precondition failure
(precision, missing digits), 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
import mpmath

from .cf import CFWord, cf_matrix
from .errors import BudgetExceeded, PrecisionError
from .jimm import jimm_real, jimm_surd, jimm_word
from .reals import RealSource, expand
from .relations import (build_dictionary, dictionary_relation_search, minpoly_search,
                        mp_from_interval, profile_correlation)
from .stats import (census_sums, collapse, decimal_digits, frequency_csv, frequency_table,
                    gauss_kuzmin_p, information_density, operate_and_tabulate, theoretical_table)
from .surd import QuadraticSurd, surd_to_periodic_cf
from .suite import format_report, run_suite

log = logging.getLogger("jimmlab")

COMMANDS = ("expand", "jimm", "surd-table", "stats", "theoretical-table", "collapse-stats",
            "conj-ops", "minpoly", "dictsearch", "reproduce")

_SOURCE = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["rational", "surd", "algebraic-root", "digit-stream", "nth-root", "pi"]},
        "label": {"type": "string"},
    },
}
_POS = {"type": "integer", "minimum": 1}

PARAMS = {
    "expand": {"required": ["source", "n_terms"],
               "properties": {"source": _SOURCE, "n_terms": _POS}},
    "jimm": {"required": ["source"],
             "properties": {"source": _SOURCE, "input_terms": _POS, "digits": _POS}},
    "surd-table": {"properties": {"n_min": _POS, "n_max": _POS, "k_max": _POS,
                                  "values": {"type": "array", "items": _POS}}},
    "stats": {"required": ["source", "input_terms"],
              "properties": {"source": _SOURCE, "input_terms": _POS,
                             "collapse": {"type": "integer", "minimum": 0},
                             "apply_jimm": {"type": "boolean"}, "max_quotient": _POS}},
    "theoretical-table": {"properties": {"rows": _POS}},
    "collapse-stats": None,  # same parameters as stats
    "conj-ops": {"required": ["operands", "operations"],
                 "properties": {
                     "operands": {"type": "object", "additionalProperties": {
                         "type": "object", "required": ["source", "input_terms"],
                         "properties": {"source": _SOURCE, "input_terms": _POS,
                                        "apply_jimm": {"type": "boolean"}}}},
                     "operations": {"type": "array", "items": {
                         "type": "object", "required": ["label", "op", "a"],
                         "properties": {"label": {"type": "string"},
                                        "op": {"enum": ["add", "mul", "qmul"]},
                                        "a": {"type": "string"}, "b": {"type": "string"},
                                        "q": {"type": "string"}}}},
                     "max_quotient": _POS}},
    "minpoly": {"required": ["source", "digits", "max_degree", "c_max"],
                "properties": {"source": _SOURCE, "apply_jimm": {"type": "boolean"},
                               "digits": _POS, "max_degree": _POS, "c_max": {"type": "integer", "minimum": 2}}},
    "dictsearch": {"required": ["bases", "ladder", "c_max", "precision"],
                   "properties": {
                       "bases": {"type": "array", "minItems": 1, "maxItems": 3, "items": {
                           "type": "object", "required": ["label", "source"],
                           "properties": {"label": {"type": "string"}, "source": _SOURCE,
                                          "apply_jimm": {"type": "boolean"}}}},
                       "ladder": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
                       "c_max": {"type": "integer", "minimum": 2}, "precision": _POS,
                       "target": {"type": "string"}}},
    "reproduce": {"properties": {"golden_dir": {"type": "string"},
                                 "only": {"type": "array", "items": _POS}}},
}

PARAMS["collapse-stats"] = PARAMS["stats"]

MANIFEST_SCHEMA = {
    "type": "object",
    "required": ["id", "command", "params"],
    "properties": {
        "id": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "command": {"enum": list(COMMANDS)},
        "description": {"type": "string"},
        "params": {"type": "object"},
        "heavy": {"type": "object"},
    },
}


class ManifestError(Exception):
    pass


def validate_manifest(m: dict) -> None:
    """Raise :class:`ManifestError` naming the offending field."""
    for schema, base, obj in ((MANIFEST_SCHEMA, [], m),):
        _validate(obj, schema, base)
    params_schema = dict(PARAMS[m["command"]], type="object")
    _validate(m["params"], params_schema, ["params"])
    if "heavy" in m:
        _validate(m["heavy"], {"type": "object", "properties": params_schema.get("properties", {})},
                  ["heavy"])


def _validate(obj, schema, base):
    v = jsonschema.Draft202012Validator(schema)
    errors = sorted(v.iter_errors(obj), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        path = ".".join(str(p) for p in base + list(e.absolute_path)) or "<root>"
        raise ManifestError(f"{path}: {e.message}")


def load_manifest(path: str) -> dict:
    """Read a manifest; a bare name refers to a shipped manifest."""
    p = Path(path)
    if not p.exists():
        ref = resources.files("jimmlab") / "data" / "manifests" / (p.name if p.suffix else f"{p.name}.json")
        if not ref.is_file():
            raise FileNotFoundError(path)
        return json.loads(ref.read_text(encoding="utf-8"))
    return json.loads(p.read_text(encoding="utf-8"))


# -- helpers --------------------------------------------------------------------

def _source(obj: dict) -> RealSource:
    if obj["kind"] == "surd" and "text" in obj:
        return RealSource.of_surd(QuadraticSurd.parse(obj["text"]), obj.get("label", ""))
    return RealSource.from_json(obj)


@lru_cache(maxsize=16)
def _word(source_json: str, input_terms: int, apply_jimm: bool) -> CFWord:
    src = _source(json.loads(source_json))
    w = expand(src, input_terms - 1)
    if not apply_jimm:
        return w
    return jimm_word(CFWord.from_terms(w.terms, truncated=True)).output


def _key(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True)


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def _real(obj: dict, apply_jimm: bool, digits: int):
    src = _source(obj)
    if apply_jimm:
        iv = jimm_real(src, digits + 5).interval
    else:
        iv = src.interval(digits + 5)
    return mp_from_interval(iv, digits)


# -- commands -------------------------------------------------------------------

def cmd_expand(p: dict) -> dict:
    w = expand(_source(p["source"]), p["n_terms"])
    return {"json": {"source": p["source"], "word": w.to_json()}}


def cmd_jimm(p: dict) -> dict:
    out: dict = {"source": p["source"]}
    if "input_terms" in p:
        w = _word(_key(p["source"]), p["input_terms"], True)
        _, _, q, _ = cf_matrix(w.terms)
        out.update({"input_terms": p["input_terms"], "output_terms": len(w.terms),
                    "output_quotients": len(w.quotients), "certified_terms": len(w.terms) - 1,
                    "denominator_digits": decimal_digits(q) + 1,
                    "information_density": round(information_density(w), 6),
                    "head": list(w.terms[:60])})
    if "digits" in p:
        r = jimm_real(_source(p["source"]), p["digits"] + 2)
        out["decimal"] = r.decimal(p["digits"])
    return {"json": out}


def cmd_surd_table(p: dict) -> dict:
    ns = p.get("values") or range(p.get("n_min", 2), p.get("n_max", 37) + 1)
    rows = []
    lines = ["N,p,q,d,r,jimm,norm,period"]
    for n in ns:
        if int(n ** 0.5) ** 2 == n:
            continue
        k_max = p.get("k_max", 64)
        s = jimm_surd(QuadraticSurd.sqrt(n), k_start=min(4, k_max), k_max=k_max)
        period = surd_to_periodic_cf(s)
        rows.append({"N": n, **s.to_json(), "jimm": str(s), "norm": str(s.norm()), "period": str(period)})
        lines.append(f"{n},{s.p},{s.q},{s.d},{s.r},\"{s}\",{s.norm()},\"{period}\"")
    return {"json": {"rows": rows}, "csv": "\n".join(lines) + "\n"}


def _table_outputs(label: str, w: CFWord, max_q: int) -> dict:
    t = frequency_table(w)
    return {"json": {"series": label, "quotients": len(w.quotients), "table": t.to_json(max_q)},
            "csv": frequency_csv({label: t}, max_q)}


def cmd_stats(p: dict, default_collapse: int = 0) -> dict:
    w = _word(_key(p["source"]), p["input_terms"], p.get("apply_jimm", True))
    depth = p.get("collapse", default_collapse)
    for _ in range(depth):
        w = collapse(w)
    label = ("P" * depth) + ("J" if p.get("apply_jimm", True) else "") + f"({p['source'].get('label') or p['source']['kind']})"
    return _table_outputs(label, w, p.get("max_quotient", 13))


def cmd_collapse_stats(p: dict) -> dict:
    return cmd_stats(p, default_collapse=1)


def cmd_theoretical_table(p: dict) -> dict:
    rows = theoretical_table(p.get("rows", 11))
    lines = ["i,k,m,u,p"]
    for r in rows:
        pv = "" if r["p"] is None else f"{r['p']:.10f}"
        lines.append(f"{r['i']},{r['k']:.10f},{r['m']:.10f},{r['u']:.10f},{pv}")
    s1, s2 = census_sums()
    return {"json": {"rows": rows, "census_sums": [s1, s2]}, "csv": "\n".join(lines) + "\n"}


def cmd_conj_ops(p: dict) -> dict:
    words = {}
    for name, spec in p["operands"].items():
        w = _word(_key(spec["source"]), spec["input_terms"], spec.get("apply_jimm", True))
        # drop the open separator: only certified terms feed the arithmetic
        words[name] = CFWord.from_terms(w.terms[:-1], truncated=True) if spec.get("apply_jimm", True) else w
    tables = {}
    results = []
    for op in p["operations"]:
        a = words[op["a"]]
        b = words[op["b"]] if "b" in op else None
        q = Fraction(op["q"]) if "q" in op else None
        r = operate_and_tabulate(a, b, op["op"], q, op["label"])
        results.append({"label": op["label"], "quotients": r.table.total,
                        "constant": None if r.constant is None else str(r.constant),
                        "table": r.table.to_json(p.get("max_quotient", 20))})
        if not r.degenerate:
            tables[op["label"]] = r.table
    max_q = p.get("max_quotient", 20)
    csv_text = frequency_csv(tables, max_q)
    gk = "".join(f"{k},{100 * gauss_kuzmin_p(k):.3f},gauss-kuzmin\n" for k in range(1, max_q + 1))
    return {"json": {"operations": results}, "csv": csv_text + gk}


def cmd_minpoly(p: dict) -> dict:
    digits = p["digits"]
    with mpmath.workdps(digits):
        x = _real(p["source"], p.get("apply_jimm", False), digits)
        r = minpoly_search(x, p["max_degree"], p["c_max"], digits=digits)
    lines = ["degree,residual,norm_bound"] + [f"{m},{res:.6e},{b:.6e}" for m, res, b in r.profile]
    out = {"found": r.found, "polynomial": list(r.polynomial) if r.found else None,
           "expression": str(r), "profile": [list(t) for t in r.profile]}
    if not r.found and len(r.profile) >= 3:
        out["profile_correlation"] = round(profile_correlation(r.profile), 6)
    return {"json": out, "csv": "\n".join(lines) + "\n"}


def cmd_dictsearch(p: dict) -> dict:
    digits = p["precision"]
    with mpmath.workdps(digits):
        bases = [(b["label"], _real(b["source"], b.get("apply_jimm", True), digits)) for b in p["bases"]]
        entries = build_dictionary(bases, digits)
        rungs = dictionary_relation_search(entries, p["ladder"], p["c_max"],
                                           target=p.get("target", bases[0][0]), digits=digits)
    return {"json": {"dictionary_size": len(entries), "c_max": p["c_max"], "precision": digits,
                     "rungs": [r.to_json() for r in rungs]}}


def cmd_reproduce(p: dict, heavy: bool = False) -> dict:
    results = run_suite(p.get("golden_dir"), heavy=heavy, only=p.get("only"))
    report = format_report(results)
    failed = any(r.status == "FAIL" for r in results)
    return {"json": {"results": [r.__dict__ for r in results]}, "txt": report, "failed": failed}


HANDLERS = {
    "expand": cmd_expand, "jimm": cmd_jimm, "surd-table": cmd_surd_table, "stats": cmd_stats,
    "theoretical-table": cmd_theoretical_table, "collapse-stats": cmd_collapse_stats,
    "conj-ops": cmd_conj_ops, "minpoly": cmd_minpoly, "dictsearch": cmd_dictsearch,
}


def run(manifest: dict, out_dir: str | Path, heavy: bool = False) -> int:
    """Run a validated manifest, write its outputs and return the exit code."""
    try:
        validate_manifest(manifest)
    except ManifestError as exc:
        print(f"manifest error: {exc}", file=sys.stderr)
        return 1
    params = dict(manifest["params"])
    if heavy and "heavy" in manifest:
        log.warning("heavy mode for %s: this can take hours", manifest["id"])
        params.update(manifest["heavy"])
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if manifest["command"] == "reproduce":
            res = cmd_reproduce(params, heavy)
        else:
            res = HANDLERS[manifest["command"]](params)
    except (PrecisionError, FileNotFoundError) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    stem = manifest["id"]
    (out / f"{stem}.json").write_text(_dump(res["json"]), encoding="utf-8")
    if "csv" in res:
        (out / f"{stem}.csv").write_text(res["csv"], encoding="utf-8")
    if "txt" in res:
        (out / f"{stem}.txt").write_text(res["txt"], encoding="utf-8")
        sys.stdout.write(res["txt"])
    return 1 if res.get("failed") else 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="jimmlab", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--manifest", help="manifest path or the name of a shipped manifest")
    ap.add_argument("--out", default=".", help="output directory (default: current)")
    ap.add_argument("--heavy", action="store_true", help="use full-scale parameters")
    ap.add_argument("--golden-dir", help="reproduce: compare against this golden-data directory")
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.manifest is None:
        if args.command != "reproduce":
            ap.error("--manifest is required for this command")
        manifest = {"id": "reproduce", "command": "reproduce", "params": {}}
    elif args.golden_dir and args.command != "reproduce":
        ap.error("--golden-dir only applies to reproduce")
    else:
        try:
            manifest = load_manifest(args.manifest)
        except FileNotFoundError as exc:
            print(f"no such manifest: {exc}", file=sys.stderr)
            return 2
        except json.JSONDecodeError as exc:
            print(f"manifest error: <root>: invalid JSON ({exc})", file=sys.stderr)
            return 1
    if manifest.get("command") not in (None, args.command):
        print(f"manifest error: command: manifest is for {manifest['command']!r}, "
              f"not {args.command!r}", file=sys.stderr)
        return 1
    if args.golden_dir:
        manifest = dict(manifest, params=dict(manifest.get("params", {}), golden_dir=args.golden_dir))
    return run(manifest, args.out, args.heavy)


if __name__ == "__main__":
    sys.exit(main())
