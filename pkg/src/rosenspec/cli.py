"""Command-line front end: spectra, reconstructions, verify suites, queries."""
from __future__ import annotations

import argparse
import json
import re
import sys
from typing import Any, Sequence

from . import poly as P
from . import scheme as Sch
from .errors import MismatchBug, ParseError, RosenspecError, TooLarge
from .modules import FGModule, cyclic, direct_sum, free, present_module, zero_module
from .pidmod import PidModule, pid_direct_sum, present_pid_module
from .rings import FiniteRing, Ideal, PolyRing, is_prime_ideal, enumerate_ideals_primes, make_ring, parse_shorthand
from .spectrum import (NO, YES, PrecedesVerdict, is_spectral, precedes, replay_certificate, replay_colon,
                       replay_pid, replay_witness, spec_points)
from .suites import SUITES, Instance, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit with 2 and no traceback
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ---------------------------------------------------------------------------
# parsing operands


def parse_ring(text: str | None):
    if text is None:
        return None
    text = text.strip()
    try:
        if text.startswith("{"):
            return make_ring(json.loads(text))
        return parse_shorthand(text)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot parse ring {text!r}") from exc


def parse_scheme(text: str | None, ring):
    if text is None:
        return None
    text = text.strip()
    if text == "affine":
        if ring is None:
            raise ParseError("--scheme affine needs --ring")
        return Sch.affine(ring)
    try:
        if text.startswith("{"):
            return Sch.build_scheme(json.loads(text))
        return Sch.build_scheme(text)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot parse scheme {text!r}") from exc


def parse_poly(text: str, var: str, p: int) -> P.Poly:
    """Polynomials like t^2+t+1 or 3t+2 in one variable."""
    s = text.replace(" ", "").replace("*", "")
    if not s:
        raise ParseError("empty polynomial")
    out: P.Poly = P.ZERO
    for sign, term in re.findall(r"([+-]?)([^+-]+)", s):
        m = re.fullmatch(rf"(\d*){re.escape(var)}(?:\^(\d+))?|(\d+)", term)
        if not m:
            raise ParseError(f"cannot parse term {term!r} in {text!r}")
        if m.group(3) is not None:
            c, e = int(m.group(3)), 0
        else:
            c = int(m.group(1)) if m.group(1) else 1
            e = int(m.group(2)) if m.group(2) else 1
        if sign == "-":
            c = -c
        out = P.add(out, tuple([0] * e + [c % p]), p)
    return out


def parse_element(R, text: str):
    text = text.strip()
    if isinstance(R, PolyRing):
        return parse_poly(text, R.var, R.p)
    if text.startswith("["):
        return R.canon(json.loads(text))
    try:
        return R.from_int(int(text))
    except ValueError as exc:
        raise ParseError(f"cannot parse ring element {text!r}") from exc


def _cyclic_by_order(R: FiniteRing, n: int) -> FGModule:
    """Z/n as the quotient R/(n) of a cyclic ring Z/N with n | N."""
    if R.k != 1 or R.size % n:
        raise ParseError(f"Z/{n} is not a quotient of {R.label}")
    return cyclic(R, R.ideal([R.from_int(n)]), label=f"Z/{n}")


def parse_module(R, text: str):
    """R, R^k, R/(a), R/(a,b), Z/n, 0 and sums joined by +."""
    parts = [x.strip() for x in re.split(r"\+(?![^()]*\))", text) if x.strip()]
    if not parts:
        raise ParseError(f"cannot parse module {text!r}")
    mods = [_parse_summand(R, x) for x in parts]
    out = mods[0]
    for M in mods[1:]:
        out = pid_direct_sum(out, M) if isinstance(out, PidModule) else direct_sum(out, M)
    return out


def _parse_summand(R, text: str):
    pid = isinstance(R, PolyRing)
    if text == "0":
        return PidModule(R, 0) if pid else zero_module(R)
    m = re.fullmatch(r"R(?:\^(\d+))?", text)
    if m:
        g = int(m.group(1) or 1)
        return PidModule(R, g) if pid else free(R, g)
    m = re.fullmatch(r"R/\((.*)\)", text)
    if m:
        gens = [parse_element(R, x) for x in m.group(1).split(",")]
        if pid:
            return PidModule(R, 0, [R.ideal(gens).gen])
        return cyclic(R, R.ideal(gens), label=text)
    m = re.fullmatch(r"Z/(\d+)", text)
    if m and not pid:
        return _cyclic_by_order(R, int(m.group(1)))
    raise ParseError(f"cannot parse module {text!r}")


def load_module(R, path: str):
    with open(path) as fh:
        data = json.load(fh)
    if "ring" in data and R is None:
        R = make_ring(data["ring"])
    if isinstance(R, PolyRing):
        rels = [[parse_poly(a, R.var, R.p) if isinstance(a, str) else tuple(a) for a in row]
                for row in data.get("relations", [])]
        return R, present_pid_module(R, int(data["g"]), rels)
    rels = [[tuple(a) if isinstance(a, list) else R.from_int(a) for a in row] for row in data.get("relations", [])]
    return R, present_module(R, int(data["g"]), rels)


def _operand(R, text: str | None, what: str, preloaded=None):
    if preloaded is not None:
        return preloaded
    if text is None:
        raise ParseError(f"--{what} is required")
    return parse_module(R, text)


# ---------------------------------------------------------------------------
# output


def emit(obj: Any, as_json: bool, human: str) -> None:
    if as_json:
        print(json.dumps(obj, sort_keys=True, default=_json_default))
    else:
        print(human)


def _json_default(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if hasattr(x, "to_json"):
        return x.to_json()
    return str(x)


# ---------------------------------------------------------------------------
# commands


def cmd_spec(args) -> int:
    ring = parse_ring(args.ring)
    X = parse_scheme(args.scheme, ring)
    if X is not None and not (X.kind == "affine" and isinstance(X.charts[0], FiniteRing)):
        rep = Sch.spec_of_qcoh(X, args.bound)
        pts = rep["points"]
        out = {"scheme": X.label, "window": args.bound, "points": pts, "count": len(pts), "ok": rep["ok"]}
        lines = [f"Spec of sheaves on {X.label} (degree window {args.bound}): {len(pts)} points"]
        lines += [f"  {x}" for x in pts]
        emit(out, args.json, "\n".join(lines))
        return EXIT_OK if rep["ok"] else EXIT_FAIL
    R = ring if ring is not None else X.charts[0]
    if R is None:
        raise ParseError("spec needs --ring or --scheme")
    bound = None if isinstance(R, FiniteRing) else args.bound
    pts, report = spec_points(R, bound)
    ok = all(v == YES for v in report["spectral"].values()) and all(r["ok"] for r in report["order"].values()) \
        and all(r["replayed"] for r in report["rejected"].values())
    out: dict = {"ring": R.label, "points": [p.to_json() for p in pts], "count": len(pts), "ok": ok}
    lines = [f"Spec {R.label}: {len(pts)} point{'s' if len(pts) != 1 else ''}"]
    lines += [f"  {p.label:<16} represented by R/{p.label}" for p in pts]
    if isinstance(R, FiniteRing):
        from .topology import build_topology
        top = build_topology(R)
        out["closed_sets"] = top["closed_sets"]
        out["rejected"] = sorted(report["rejected"])
        lines.append("closed sets: " + ", ".join("{" + ",".join(c) + "}" for c in top["closed_sets"]))
    emit(out, args.json, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_reconstruct(args) -> int:
    ring = parse_ring(args.ring)
    X = parse_scheme(args.scheme or ("affine" if ring is not None else None), ring)
    if X is None:
        raise ParseError("reconstruct needs --scheme")
    needs = any(isinstance(R, PolyRing) for R in X.charts)
    bound = args.bound if needs else None
    try:
        rep = Sch.reconstruct_and_compare(X, bound)
    except MismatchBug as exc:
        rep = getattr(exc, "report", {"error": str(exc)})
        emit(_strip(rep), args.json, f"MISMATCH on {X.label}: {exc}")
        return EXIT_FAIL
    lines = [f"Reconstruction of {X.label}" + (f" on degree window {bound}" if bound is not None else "")]
    for n, comp in enumerate(rep["components"]):
        if len(rep["components"]) > 1:
            lines.append(f"component {n} (charts {comp['charts']}):")
        lines.append(f"  points matched: {sum(r['ok'] for r in comp['points'])}/{len(comp['points'])}  "
                     + " ".join(r["point"] for r in comp["points"]))
        st = comp["structure"]
        for r in st.get("opens", []) + st.get("rings", []):
            lines.append(f"  O({r['open']}) = {r['ring']}  {'matched' if r['ok'] else 'MISMATCH'}")
        for s in comp.get("sections", []):
            lines.append(f"  dim sections O({s['n']}) = {s['dimension']}")
    if not rep["components"]:
        lines.append("  empty scheme: trivial match")
    lines.append("all matched" if rep["matched"] else "MISMATCH")
    emit(_strip(rep), args.json, "\n".join(lines))
    return EXIT_OK


def _strip(rep: dict) -> dict:
    """Drop live objects from a report before serializing."""
    def walk(x):
        if isinstance(x, dict):
            return {str(k): walk(v) for k, v in x.items() if k != "centers"}
        if isinstance(x, (list, tuple)):
            return [walk(v) for v in x]
        if isinstance(x, (str, int, float, bool)) or x is None:
            return x
        return str(x)
    return walk(rep)


def cmd_verify(args) -> int:
    name = args.suite
    if name not in SUITES:
        from .errors import UnknownSuite
        raise UnknownSuite(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    default = SUITES[name][1]
    ring = parse_ring(args.ring)
    X = parse_scheme(args.scheme, ring)
    if ring is None and X is None:
        if default.startswith("p1:"):
            X = Sch.build_scheme(default)
        else:
            ring = parse_ring(default)
    if X is not None and X.kind == "affine" and ring is None:
        ring = X.charts[0]
    inst = Instance(ring=ring, scheme=X, bound=args.bound, seed=args.seed)
    rep = run_suite(name, inst)
    c = rep.counts()
    lines = [f"suite {name} on {inst.describe()}: {c['pass']} pass, {c['fail']} fail, {c['unknown']} unknown "
             f"({rep.seconds:.2f}s)"]
    for ch in rep.checks:
        if ch.status != "pass" or args.verbose:
            lines.append(f"  [{ch.status}] {ch.name}")
    emit(rep.to_json(), args.json, "\n".join(lines))
    return EXIT_FAIL if rep.failed(args.strict) else EXIT_OK


def cmd_query(args) -> int:
    ring = parse_ring(args.ring)
    args.m_obj = None
    if args.file:
        ring, args.m_obj = load_module(ring, args.file)
        args.m = args.m or args.file
    if ring is None:
        raise ParseError("query needs --ring")
    handler = {"precedes": _q_precedes, "spectral": _q_spectral, "quothom": _q_quothom,
               "center": _q_center}[args.what]
    return handler(args, ring)


def _q_precedes(args, R) -> int:
    if args.replay:
        with open(args.replay) as fh:
            data = json.load(fh)
        M = parse_module(R, data.get("m", args.m))
        N = parse_module(R, data.get("n", args.n))
        v = data["verdict"]
        ok = _replay(M, N, v)
        emit({"replayed": ok, "outcome": v["outcome"]}, args.json,
             f"replay of {v['outcome'].lower()} verdict: {'verified' if ok else 'FAILED'}")
        return EXIT_OK if ok else EXIT_FAIL
    M = _operand(R, args.m, "m", args.m_obj)
    N = _operand(R, args.n, "n")
    v = precedes(M, N, args.bound)
    out = {"ring": R.label, "m": args.m, "n": args.n, "verdict": v.to_json()}
    why = ""
    if v.certificate:
        kind = v.certificate.get("kind", "")
        why = {"AnnObstruction": "ann certificate", "SuppObstruction": "support certificate",
               "ExhaustedProof": "exhaustive search"}.get(kind, kind)
        if kind == "PidStructure":
            why = f"{v.certificate.get('reason')} certificate"
    elif v.witness:
        why = f"witness with n = {v.witness.get('n')}"
    emit(out, args.json, f"{v.outcome.lower()} ({why})" if why else v.outcome.lower())
    return EXIT_OK


def _replay(M, N, v: dict) -> bool:
    verdict = PrecedesVerdict(v["outcome"], v.get("witness"), v.get("certificate"), v.get("bound"),
                              v.get("route", ""))
    if isinstance(M, PidModule):
        return replay_pid(M, N, verdict)
    if v["outcome"] == YES:
        return replay_witness(M, N, v["witness"])
    if v["outcome"] == NO:
        return replay_certificate(M, N, v["certificate"])
    return False


def _q_spectral(args, R) -> int:
    if args.replay:
        with open(args.replay) as fh:
            data = json.load(fh)
        M = parse_module(R, data.get("m", args.m))
        v = data["verdict"]
        ok = _replay_spectral(M, v)
        emit({"replayed": ok, "outcome": v["outcome"]}, args.json,
             f"replay of {v['outcome'].lower()} verdict: {'verified' if ok else 'FAILED'}")
        return EXIT_OK if ok else EXIT_FAIL
    M = _operand(R, args.m, "m", args.m_obj)
    v = is_spectral(M, args.bound)
    out = {"ring": R.label, "m": args.m, "verdict": v.to_json()}
    emit(out, args.json, f"{v.outcome.lower()} ({v.route})")
    return EXIT_OK


def _replay_spectral(M, v: dict) -> bool:
    cert = v.get("certificate") or {}
    kind = cert.get("kind")
    if isinstance(M, PidModule):
        # the PID criterion is a closed formula: recomputing it is the replay
        return is_spectral(M).to_json() == v
    R = M.ring
    I = Ideal(R, M.K) if M.g == 1 and R.k == M.ncols else None
    if kind == "PrimeQuotient":
        return I is not None and is_prime_ideal(I) and I.label() == cert["ideal"] and v["outcome"] == YES
    if kind == "ColonObstruction":
        return I is not None and v["outcome"] == NO and replay_colon(R, I, cert)
    if v["outcome"] == NO and v.get("counterexample"):
        S = M.submodule([[tuple(a) for a in g] for g in v["counterexample"]])
        if S.is_zero():
            return False
        N, _ = S.as_module()
        return replay_certificate(M, N, cert)
    if v["outcome"] == YES:
        return is_spectral(M, fast=False).outcome == YES
    return False


def _thick(R, text: str | None):
    from .quotient import thick_of_open
    if text is None:
        raise ParseError("--open is required")
    labels = [x.strip() for x in re.findall(r"\([^)]*\)", text)]
    _, primes = enumerate_ideals_primes(R)
    try:
        return thick_of_open(R, labels, primes)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def _q_quothom(args, R) -> int:
    from .quotient import QuotientCategory
    if not isinstance(R, FiniteRing):
        raise ParseError("quotient categories are computed over finite rings")
    T = _thick(R, args.open)
    M, N = _operand(R, args.m, "m", args.m_obj), _operand(R, args.n, "n")
    C = QuotientCategory(T)
    G = C.hom_group(M, N)
    gens = C.hom_generators(M, N)
    out = {"ring": R.label, "open": list(T.open_set), "m": args.m, "n": args.n, "order": G.order,
           "generators": [f.hom.to_json() for f in gens]}
    emit(out, args.json, f"Hom({args.m}, {args.n}) in the quotient by {T.label()}: order {G.order}")
    return EXIT_OK


def _q_center(args, R) -> int:
    from .quotient import center_of_category, center_of_quotient, test_family
    if not isinstance(R, FiniteRing):
        c = Sch.pid_center(R, min(args.bound, 2))
        emit(c, args.json, f"center of Mod {R.label}: {R.label} (sampled, {'ok' if c['ok'] else 'FAILED'})")
        return EXIT_OK if c["ok"] else EXIT_FAIL
    if args.open is None:
        c = center_of_category(R)
        emit(c.to_json(), args.json, f"center of Mod {R.label}: order {c.order} "
                                     f"({'isomorphic to R' if c.ok else 'MISMATCH'})")
        return EXIT_OK if c.ok else EXIT_FAIL
    T = _thick(R, args.open)
    C = center_of_quotient(R, T, test_family(R, sums=False))
    S = C.local_ring
    name = R.label if S.size == R.size else Sch._ring_name(S)
    out = {"ring": R.label, "open": list(T.open_set), "center": name, "order": C.report["order"],
           "checks": {k: v for k, v in C.report.items()}}
    emit(out, args.json, name)
    return EXIT_OK if C.report["ok"] else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", help="zmod:n, gf:q, poly:gf:q:t, z4x2 or a JSON descriptor")
    common.add_argument("--scheme", help="p1:q, p1:q:rational, affine (with --ring), empty, or JSON")
    common.add_argument("--bound", type=int, default=3, help="degree window and search copies (default 3)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--strict", action="store_true", help="treat unknown as failure")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled suites")
    common.add_argument("--file", help="JSON module description")
    ap = Parser(prog="rosenspec", description="Spectra of module and sheaf categories.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=Parser)
    sub.add_parser("spec", parents=[common], help="points of the spectrum")
    sub.add_parser("reconstruct", parents=[common], help="rebuild a scheme from its sheaves")
    v = sub.add_parser("verify", parents=[common], help="run a named property suite")
    v.add_argument("--suite", required=True, help=", ".join(SUITES))
    v.add_argument("--verbose", action="store_true", help="list passing checks too")
    q = sub.add_parser("query", parents=[common], help="single questions")
    q.add_argument("what", choices=["precedes", "spectral", "quothom", "center"])
    q.add_argument("--m", help="module such as Z/4, R/(3), R^2 + R/(2)")
    q.add_argument("--n", help="second module")
    q.add_argument("--open", help="open set such as (2) or (2),(3)")
    q.add_argument("--replay", help="re-verify a verdict saved with --json")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return {"spec": cmd_spec, "reconstruct": cmd_reconstruct, "verify": cmd_verify,
                "query": cmd_query}[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TooLarge as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (RosenspecError, TypeError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
