"""Command-line front end: batch verification, proving, composition,
linting, corpus regression, and seeded simulation.

Exit codes: 0 all selected obligations hold / are provable, 1 at least
one is refuted (with a counterexample in the report), 2 usage or input
errors.  Verification is exhaustive; --seed only affects `run`.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

import yaml

from .buchi import Lasso, degeneralize, to_nnf, translate
from .checker import (
    DEFAULT_STATE_CAP,
    ProofResult,
    Verdict,
    check,
    compose,
    fmt_atom,
    prove,
    state_digest,
)
from .env import MAS, EnvError, load_env
from .formula import Not, Implies, conj
from .lang.analysis import lint
from .lang.parser import ParseError, parse_agent_file
from .lang.pretty import fmt_term
from .psl import expand_quantifiers, ground_property, load_props
from .sim import simulate_cruise, simulate_rescue
from .terms import Const

CORPUS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "corpus")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# report rendering


def _lasso_digests(mas, verdict: Verdict) -> dict:
    cx = verdict.counterexample
    return {
        "prefix": [state_digest(mas, s, verdict.atoms) for s in cx.prefix],
        "cycle": [state_digest(mas, s, verdict.atoms) for s in cx.cycle],
    }


def _diff(prev: dict, cur: dict) -> list:
    """Human-oriented delta between two state digests."""
    out = []
    if cur.get("last_action"):
        out.append("action %s" % cur["last_action"])
    for key in ("percepts", "shared"):
        gained = [t for t in cur[key] if t not in prev[key]]
        lost = [t for t in prev[key] if t not in cur[key]]
        if gained:
            out.append("+%s %s" % (key, ", ".join(gained)))
        if lost:
            out.append("-%s %s" % (key, ", ".join(lost)))
    for name, ag in cur["agents"].items():
        before = prev["agents"][name]
        for key, mark in (("beliefs", "b"), ("goals", "g")):
            gained = [t for t in ag[key] if t not in before[key]]
            lost = [t for t in before[key] if t not in ag[key]]
            if gained:
                out.append("%s: +%s %s" % (name, mark, ", ".join(gained)))
            if lost:
                out.append("%s: -%s %s" % (name, mark, ", ".join(lost)))
    return out


def _render_lasso_text(mas, verdict: Verdict, out) -> None:
    cx = verdict.counterexample
    seq = cx.prefix + cx.cycle
    digests = [state_digest(mas, s, verdict.atoms) for s in seq]
    loop = len(cx.prefix)
    print("counterexample lasso (%d prefix + %d cycle states):" % (loop, len(cx.cycle)), file=out)
    first = digests[0]
    print("  [0] initial: percepts={%s}" % ", ".join(first["percepts"]), file=out)
    for name, ag in first["agents"].items():
        print("      %s: beliefs={%s} goals={%s}" % (name, ", ".join(ag["beliefs"]), ", ".join(ag["goals"])), file=out)
    for i in range(1, len(digests)):
        marker = " <- cycle start" if i == loop else ""
        deltas = _diff(digests[i - 1], digests[i]) or ["(stutter)"]
        print("  [%d]%s %s" % (i, marker, "; ".join(deltas)), file=out)
    if loop == 0:
        print("  (cycle closes back to state 0)", file=out)
    else:
        print("  (cycle closes back to state %d)" % loop, file=out)


def _json_report(payload: dict, out) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True), file=out)


def _verdict_payload(name: str, verdict: Verdict, mas=None, hyp_names=()) -> dict:
    d = {
        "property": name,
        "verdict": "holds" if verdict.holds else "fails",
        "states": verdict.states,
        "transitions": verdict.transitions,
        "time_ms": round(verdict.time_ms, 3),
        "assumptions": [{"name": h, "status": "assumed"} for h in hyp_names],
    }
    if verdict.counterexample is not None and mas is not None:
        d["counterexample"] = _lasso_digests(mas, verdict)
    return d


# ---------------------------------------------------------------------------
# input assembly


def _build_mas(args) -> MAS:
    if args.env:
        return load_env(args.env)
    if not args.agents:
        raise UsageError("need --env or --agents")
    programs = [parse_agent_file(p) for p in args.agents]
    return MAS(programs)


def _extra_hypotheses(pf, specs: list, base: str):
    """--hypothesis NAME or NAME=FILE entries, expanded."""
    named = []
    for spec in specs or ():
        if "=" in spec:
            name, path = spec.split("=", 1)
            other = load_props(os.path.join(base, path) if not os.path.isabs(path) else path)
            source = other
        else:
            name, source = spec, pf
        if name not in source.defs:
            raise UsageError("unknown hypothesis %r" % name)
        named.append((name, expand_quantifiers(source.defs[name], source.domains)))
    return named


def _select_properties(pf, names) -> list:
    if names:
        missing = [n for n in names if n not in pf.properties]
        if missing:
            raise UsageError("unknown properties: %s" % ", ".join(missing))
        return list(names)
    return list(pf.properties)


class _InitialSlice:
    """A MAS restricted to a subset of its initial states (partition mode)."""

    def __init__(self, mas, initials):
        self._mas = mas
        self._initials = list(initials)

    def __getattr__(self, name):
        return getattr(self._mas, name)

    def initial_states(self):
        return list(self._initials)


def _check_partitioned(mas, formula, hyps, state_cap, tableau_cap, k) -> Verdict:
    initials = mas.initial_states()
    groups = [initials[i::k] for i in range(k)]
    total_states = total_trans = 0
    time_ms = 0.0
    for group in groups:
        if not group:
            continue
        v = check(_InitialSlice(mas, group), formula, hyps, state_cap, tableau_cap)
        total_states += v.states
        total_trans += v.transitions
        time_ms += v.time_ms
        if not v.holds:
            return Verdict(False, v.counterexample, total_states, total_trans, time_ms, v.formula, v.atoms)
    return Verdict(True, None, total_states, total_trans, time_ms)


def _dump_automaton(formula, hyps, tableau_cap, out) -> None:
    f = formula if not hyps else Implies(conj(list(hyps)), formula)
    aut = degeneralize(translate(to_nnf(Not(f)), node_cap=tableau_cap))
    print("automaton for the negated obligation:", file=out)
    for q in range(aut.n_states):
        pos, neg = aut.labels[q]
        label = sorted(fmt_atom(a) for a in pos) + sorted("~" + fmt_atom(a) for a in neg)
        tags = []
        if q in aut.initial:
            tags.append("initial")
        if any(q in s for s in aut.accept_sets):
            tags.append("accepting")
        print(
            "  q%d%s {%s} -> %s"
            % (q, " [%s]" % ",".join(tags) if tags else "", ", ".join(label), ", ".join("q%d" % s for s in aut.succ[q])),
            file=out,
        )


# ---------------------------------------------------------------------------
# commands


def cmd_check(args, out) -> int:
    mas = _build_mas(args)
    pf = load_props(args.props)
    base = os.path.dirname(os.path.abspath(args.props))
    extra = _extra_hypotheses(pf, args.hypothesis, base)
    reports = []
    ok = True
    for name in _select_properties(pf, args.property):
        formula, hyps = ground_property(pf, name)
        hyp_names = list(pf.properties[name].assumes) + [n for n, _ in extra]
        all_hyps = hyps + [f for _, f in extra]
        if args.dump_automaton:
            _dump_automaton(formula, all_hyps, args.tableau_cap, out)
        if args.partition > 1:
            v = _check_partitioned(mas, formula, all_hyps, args.state_cap, args.tableau_cap, args.partition)
        else:
            v = check(mas, formula, all_hyps, args.state_cap, args.tableau_cap)
        ok = ok and v.holds
        reports.append(_verdict_payload(name, v, mas, hyp_names))
        if args.format == "text":
            print("%s: %s (%d states, %d transitions)" % (name, reports[-1]["verdict"], v.states, v.transitions), file=out)
            if v.counterexample is not None:
                _render_lasso_text(mas, v, out)
    if args.format == "json":
        _json_report({"command": "check", "env": args.env, "agents": args.agents or [], "props": args.props, "results": reports}, out)
    return 0 if ok else 1


def _proof_payload(name: str, pr: ProofResult) -> dict:
    d = {
        "property": name,
        "verdict": "provable" if pr.provable else "not_provable",
        "premises": [{"name": n, "status": s} for n, s in pr.premises],
    }
    if pr.countermodel is not None:
        d["countermodel"] = {
            "prefix": [sorted(fmt_atom(a) for a in letter) for letter in pr.countermodel.prefix],
            "cycle": [sorted(fmt_atom(a) for a in letter) for letter in pr.countermodel.cycle],
        }
    return d


def cmd_prove(args, out) -> int:
    pf = load_props(args.props)
    base = os.path.dirname(os.path.abspath(args.props))
    extra = _extra_hypotheses(pf, args.hypothesis, base)
    reports = []
    ok = True
    for name in _select_properties(pf, args.property):
        formula, hyps = ground_property(pf, name)
        all_hyps = hyps + [f for _, f in extra]
        obligation = formula if not all_hyps else Implies(conj(all_hyps), formula)
        pr = prove(obligation, args.tableau_cap)
        pr.premises = tuple(
            (n, "assumed") for n in list(pf.properties[name].assumes) + [n for n, _ in extra]
        )
        ok = ok and pr.provable
        reports.append(_proof_payload(name, pr))
        if args.format == "text":
            print("%s: %s" % (name, reports[-1]["verdict"]), file=out)
            if pr.countermodel is not None:
                cm = reports[-1]["countermodel"]
                for i, letter in enumerate(cm["prefix"] + cm["cycle"]):
                    marker = " <- cycle start" if i == len(cm["prefix"]) else ""
                    print("  [%d]%s {%s}" % (i, marker, ", ".join(letter)), file=out)
    if args.format == "json":
        _json_report({"command": "prove", "props": args.props, "results": reports}, out)
    return 0 if ok else 1


def _compose_from_props(pf, goal_name: str, premises_spec):
    """premises_spec: iterable of (name, status).  A premise naming a
    property with assumptions contributes the implication that was
    actually established, not the bare property."""
    if goal_name not in pf.defs:
        raise UsageError("unknown goal formula %r" % goal_name)
    goal = expand_quantifiers(pf.defs[goal_name], pf.domains)
    premises = []
    for name, status in premises_spec:
        if name not in pf.defs:
            raise UsageError("unknown premise %r" % name)
        f = expand_quantifiers(pf.defs[name], pf.domains)
        if name in pf.properties and pf.properties[name].assumes:
            hyps = [expand_quantifiers(pf.defs[a], pf.domains) for a in pf.properties[name].assumes]
            f = Implies(conj(hyps), f)
        premises.append((name, f, status))
    return compose(premises, goal)


def cmd_compose(args, out) -> int:
    pf = load_props(args.props)
    spec = []
    for entry in args.premise or ():
        if ":" in entry:
            name, status = entry.rsplit(":", 1)
        else:
            name, status = entry, "verified"
        if status not in ("verified", "assumed"):
            raise UsageError("premise status must be verified or assumed: %r" % entry)
        spec.append((name, status))
    if not args.goal:
        raise UsageError("compose needs --goal NAME")
    pr = _compose_from_props(pf, args.goal, spec)
    report = _proof_payload(args.goal, pr)
    if args.format == "json":
        _json_report({"command": "compose", "props": args.props, "results": [report]}, out)
    else:
        print("%s: %s" % (args.goal, report["verdict"]), file=out)
        for p in report["premises"]:
            print("  premise %s [%s]" % (p["name"], p["status"]), file=out)
    return 0 if pr.provable else 1


def cmd_lint(args, out) -> int:
    worst = 0
    for path in args.files:
        program = parse_agent_file(path)
        diags = lint(program)
        for d in diags:
            print("%s: %s" % (path, d), file=out)
            worst = 1
        if not diags and args.format == "text":
            print("%s: clean" % path, file=out)
    return worst


def cmd_run(args, out) -> int:
    if args.case == "rescue":
        program = parse_agent_file(os.path.join(CORPUS_DIR, "rescue", "searcher.agent"))
        rng = random.Random(args.seed)
        cells = [(x, y) for x in range(3) for y in range(3)]
        human = rng.choice(cells + [None])
        trace, state = simulate_rescue(program, human, max_cycles=args.steps)
        outcome = sorted(
            str(b) for b in (Const("found"), Const("area_empty")) if b in state.all_beliefs()
        )
        if args.format == "json":
            _json_report({"command": "run", "case": "rescue", "seed": args.seed, "human": list(human) if human else None, "trace": trace, "outcome": outcome}, out)
        else:
            for entry in trace:
                print("cycle %(cycle)d robot=%(robot)s percepts=%(percepts)s action=%(action)s" % entry, file=out)
            print("outcome: %s" % (", ".join(outcome) or "none"), file=out)
        return 0
    if args.case == "cruise":
        program = parse_agent_file(os.path.join(CORPUS_DIR, "cruise", "car_single.agent"))
        trace = simulate_cruise(program, args.seed, steps=args.steps)
        if args.format == "json":
            _json_report({"command": "run", "case": "cruise", "seed": args.seed, "trace": trace}, out)
        else:
            for entry in trace:
                print(
                    "step %(step)d action=%(action)s safe=%(safe_before)s gap=%(x_l).2f-%(x_f).2f" % entry,
                    file=out,
                )
        return 0
    raise UsageError("unknown simulation case %r (have: rescue, cruise)" % args.case)


# ---------------------------------------------------------------------------
# corpus regression


def load_manifest(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return yaml.safe_load(fh) or {}


def eval_manifest(path, state_cap: int = DEFAULT_STATE_CAP) -> list:
    """Machine-check every expectation in a corpus manifest.  Returns a
    list of result dicts with an "ok" field."""
    doc = load_manifest(path)
    base = os.path.dirname(os.path.abspath(str(path)))
    results = []

    def check_block(block):
        env_default = block.get("env", doc.get("env"))
        pf = load_props(os.path.join(base, block.get("props", doc.get("props"))))
        mas_cache: dict = {}
        for p in block.get("properties", []):
            env_rel = p.get("env", env_default)
            env_path = os.path.join(base, env_rel)
            if env_path not in mas_cache:
                mas_cache[env_path] = load_env(env_path)
            mas = mas_cache[env_path]
            formula, hyps = ground_property(pf, p["name"])
            v = check(mas, formula, hyps, state_cap)
            actual = "holds" if v.holds else "fails"
            results.append(
                {
                    "kind": "property",
                    "case": doc.get("name", ""),
                    "name": p["name"],
                    "env": env_rel,
                    "expected": p["expected"],
                    "actual": actual,
                    "ok": actual == p["expected"],
                    "states": v.states,
                    "time_ms": round(v.time_ms, 3),
                }
            )

    check_block(doc)
    for d in doc.get("deductions", []):
        pf = load_props(os.path.join(base, d["file"]))
        formula, hyps = ground_property(pf, d["property"])
        obligation = formula if not hyps else Implies(conj(hyps), formula)
        pr = prove(obligation)
        actual = "provable" if pr.provable else "not_provable"
        results.append(
            {
                "kind": "deduction",
                "case": doc.get("name", ""),
                "name": d["property"],
                "expected": d["expected"],
                "actual": actual,
                "ok": actual == d["expected"],
            }
        )
    for c in doc.get("compositions", []):
        pf = load_props(os.path.join(base, c.get("props", doc.get("props"))))
        pr = _compose_from_props(pf, c["goal"], [(p["name"], p["status"]) for p in c["premises"]])
        actual = "provable" if pr.provable else "not_provable"
        results.append(
            {
                "kind": "composition",
                "case": doc.get("name", ""),
                "name": c["name"],
                "expected": c["expected"],
                "actual": actual,
                "ok": actual == c["expected"],
            }
        )
    for m in doc.get("mutants", []):
        block = {"env": m["env"], "props": m.get("props", doc.get("props")), "properties": m["properties"]}
        check_block(block)
        for r in results[-len(m["properties"]):]:
            r["kind"] = "mutant"
    return results


def corpus_cases(root=CORPUS_DIR) -> list:
    out = []
    for name in sorted(os.listdir(root)):
        manifest = os.path.join(root, name, "manifest.yaml")
        if os.path.isfile(manifest):
            out.append((name, manifest))
    return out


def cmd_corpus(args, out) -> int:
    cases = corpus_cases(args.dir or CORPUS_DIR)
    if args.case:
        cases = [(n, m) for n, m in cases if n in args.case]
        missing = set(args.case) - {n for n, _ in cases}
        if missing:
            raise UsageError("unknown corpus cases: %s" % ", ".join(sorted(missing)))
    all_results = []
    for _, manifest in cases:
        all_results.extend(eval_manifest(manifest, state_cap=args.state_cap))
    ok = all(r["ok"] for r in all_results)
    if args.format == "json":
        _json_report({"command": "corpus", "results": all_results}, out)
    else:
        for r in all_results:
            print(
                "%-12s %-11s %-28s expected=%s actual=%s %s"
                % (r["case"], r["kind"], r["name"], r["expected"], r["actual"], "ok" if r["ok"] else "MISMATCH"),
                file=out,
            )
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="agentmc", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, props_required=True):
        p.add_argument("--props", required=props_required, help="property file")
        p.add_argument("--property", action="append", help="restrict to a named property (repeatable)")
        p.add_argument("--hypothesis", action="append", help="extra hypothesis NAME or NAME=FILE")
        p.add_argument("--tableau-cap", type=int, default=0)
        p.add_argument("--format", choices=("json", "text"), default="text")
        p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("check", help="model-check properties of a system")
    p.add_argument("--env", help="environment declaration (YAML)")
    p.add_argument("--agents", nargs="*", help="agent files (closed system, no percepts)")
    common(p)
    p.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)
    p.add_argument("--partition", type=int, default=1, help="split initial states into K independent checks")
    p.add_argument("--dump-automaton", action="store_true")

    p = sub.add_parser("prove", help="prove properties as LTL validities")
    common(p)

    p = sub.add_parser("compose", help="deduce a goal formula from premises")
    common(p)
    p.add_argument("--goal", help="goal formula name")
    p.add_argument("--premise", action="append", help="premise NAME[:verified|:assumed] (repeatable)")

    p = sub.add_parser("lint", help="static checks on agent files")
    p.add_argument("files", nargs="+")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--out")

    p = sub.add_parser("run", help="seeded simulation of a corpus case")
    p.add_argument("--case", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--out")

    p = sub.add_parser("corpus", help="re-check every expectation in the corpus manifests")
    p.add_argument("--case", action="append", help="restrict to named cases")
    p.add_argument("--dir", help="alternative corpus root")
    p.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--out")

    return ap


COMMANDS = {
    "check": cmd_check,
    "prove": cmd_prove,
    "compose": cmd_compose,
    "lint": cmd_lint,
    "run": cmd_run,
    "corpus": cmd_corpus,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    sink = None
    try:
        out = sys.stdout
        if getattr(args, "out", None):
            sink = open(args.out, "w", encoding="utf-8")
            out = sink
        return COMMANDS[args.command](args, out)
    except (UsageError, ParseError, EnvError, OSError, KeyError, yaml.YAMLError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    finally:
        if sink is not None:
            sink.close()


if __name__ == "__main__":
    sys.exit(main())
