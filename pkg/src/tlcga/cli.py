"""Command-line front end.

Every subcommand prints a run report: a command echo, the content hash
of the model involved, the canonical text of the formula involved, the
result lines, search counters, and the seed. Reports are byte-identical
across runs for identical inputs and seed; wall-clock timing therefore
goes to stderr, never into the report.

Exit codes: 0 the query was answered (whatever the boolean), 1 usage
error, 2 invalid input, 3 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

from . import bisim as bisim_mod
from . import corpus as corpus_mod
from . import onestep as onestep_mod
from . import stability as stability_mod
from .checking import check_with_stats
from .formulas import GoalAssignment, Strategic, StateFormula, strategic
from .models import (
    ResourceLimitError,
    disjoint_union,
    load_model,
    save_model,
)
from .parser import parse_state_formula
from .sampling import DEFAULT_SEED, falsify_scheme
from .strategies import (
    FiniteStrategyProfile,
    find_witness,
    parse_memory_mode,
    profile_from_json_dict,
    verify_witness,
)
from .transforms import (
    _SCHEMES,
    induction_formula,
    nexttime_extension,
    normal_form,
    to_mu,
    unfold,
)


class UsageError(Exception):
    """A command line that does not name a well-formed query."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunReport:
    """The deterministic output of one subcommand invocation."""

    command: str
    seed: int
    model_hash: Optional[str] = None
    formula: Optional[str] = None
    result: dict = field(default_factory=dict)
    counters: dict = field(default_factory=dict)

    def to_json_text(self) -> str:
        return json.dumps(
            {
                "command": self.command,
                "model_hash": self.model_hash,
                "formula": self.formula,
                "result": self.result,
                "counters": self.counters,
                "seed": self.seed,
            },
            indent=2,
        )

    def to_text(self) -> str:
        lines = ["command: %s" % self.command]
        if self.model_hash is not None:
            lines.append("model: %s" % self.model_hash)
        if self.formula is not None:
            lines.append("formula: %s" % self.formula)
        for key, value in self.result.items():
            lines.append("%s: %s" % (key, _plain(value)))
        for key, value in self.counters.items():
            lines.append("%s: %s" % (key, _plain(value)))
        lines.append("seed: %d" % self.seed)
        return "\n".join(lines)


def _plain(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ", ".join(_plain(item) for item in value)
    return str(value)


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--json", action="store_true", help="emit the report as JSON"
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=DEFAULT_SEED,
        help="seed for randomized work (default %d)" % DEFAULT_SEED,
    )
    parser.add_argument(
        "--jobs",
        type=int,
        default=1,
        help="worker count; every value produces the canonical output",
    )


def _model_source(parser: argparse.ArgumentParser, required=True) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--model", help="model JSON file")
    group.add_argument(
        "--corpus-case", help="built-in case name instead of a model file"
    )
    parser.add_argument(
        "--params",
        default=None,
        help="corpus case parameters as k=v,k=v (sheep-wolves only)",
    )


def _formula_source(parser, flag="--formula", required=True) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument(flag, help="formula in concrete syntax")
    group.add_argument(
        flag + "-file", help="file containing the formula text"
    )
    group.add_argument(
        flag + "-name", help="formula name from the corpus case"
    )


def _parse_params(text: Optional[str]) -> dict:
    params: dict = {}
    if not text:
        return params
    for piece in text.split(","):
        if "=" not in piece:
            raise UsageError("--params expects k=v pairs, got %r" % piece)
        key, value = piece.split("=", 1)
        params[key.strip()] = int(value) if value.isdigit() else value.strip()
    return params


def _load_case_and_model(args):
    if getattr(args, "corpus_case", None):
        case = corpus_mod.build_case(
            args.corpus_case, **_parse_params(args.params)
        )
        return case, case.model
    if args.params:
        raise UsageError("--params only applies to --corpus-case")
    return None, load_model(args.model)


def _resolve_formula(args, case, flag="formula") -> StateFormula:
    text = getattr(args, flag)
    file_arg = getattr(args, flag + "_file")
    name_arg = getattr(args, flag + "_name")
    if text is None and file_arg is not None:
        with open(file_arg, "r", encoding="utf-8") as handle:
            text = handle.read().strip()
    if text is None and name_arg is not None:
        if case is None:
            raise UsageError(
                "--%s-name needs --corpus-case" % flag.replace("_", "-")
            )
        text = case.formulas[name_arg]
    return parse_state_formula(text)


def _resolve_state(args, case) -> str:
    if args.state is not None:
        return args.state
    if case is not None:
        return case.start
    raise UsageError("--state is required with --model")


def _strategic_assignment(phi: StateFormula) -> GoalAssignment:
    if not isinstance(phi, Strategic):
        raise ValueError(
            "expected a single strategic operator, got %s" % phi
        )
    return phi.assignment


def _load_profile(path: str) -> FiniteStrategyProfile:
    with open(path, "r", encoding="utf-8") as handle:
        return profile_from_json_dict(json.load(handle))


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


# ---------------------------------------------------------------- handlers


def _cmd_check(args, report: RunReport) -> int:
    case, model = _load_case_and_model(args)
    phi = _resolve_formula(args, case)
    state = _resolve_state(args, case)
    outcome = check_with_stats(model, state, phi)
    report.model_hash = model.content_hash()
    report.formula = str(phi)
    report.result["state"] = state
    report.result["holds"] = outcome.holds
    report.counters["iterations"] = outcome.iterations
    return 0


def _cmd_oracle(args, report: RunReport) -> int:
    case, model = _load_case_and_model(args)
    phi = _resolve_formula(args, case)
    state = _resolve_state(args, case)
    assignment = _strategic_assignment(phi)
    mode = parse_memory_mode(args.mode)
    found = find_witness(model, state, assignment, mode, limit=args.limit)
    report.model_hash = model.content_hash()
    report.formula = str(phi)
    report.result["state"] = state
    report.result["mode"] = str(mode)
    report.result["outcome"] = found.outcome
    if found.witness is not None:
        report.result["witness"] = "\n" + found.witness.render()
        if args.save_witness:
            with open(args.save_witness, "w", encoding="utf-8") as handle:
                json.dump(found.witness.to_json_dict(), handle, indent=2)
            report.result["saved to"] = args.save_witness
    report.counters["explored"] = found.explored
    return 3 if found.outcome == "none (bounded)" else 0


def _cmd_validate(args, report: RunReport) -> int:
    case, model = _load_case_and_model(args)
    phi = _resolve_formula(args, case)
    state = _resolve_state(args, case)
    assignment = _strategic_assignment(phi)
    profile = _load_profile(args.witness)
    ok, failures = verify_witness(model, state, profile, assignment)
    report.model_hash = model.content_hash()
    report.formula = str(phi)
    report.result["state"] = state
    report.result["verified"] = ok
    for index, failure in enumerate(failures):
        report.result["failure %d" % index] = failure
    report.counters["failures"] = len(failures)
    return 0


def _cmd_scos(args, report: RunReport) -> int:
    _, model = _load_case_and_model(args)
    split, copies = model.scos()
    report.model_hash = model.content_hash()
    report.result["injective before"] = model.is_injective()
    report.result["injective after"] = split.is_injective()
    report.result["states before"] = len(model.states)
    report.result["states after"] = len(split.states)
    report.result["copies"] = "; ".join(
        "%s: %d" % (state, len(copies[state])) for state in model.states
    )
    if args.out:
        save_model(split, args.out)
        report.result["written"] = args.out
    return 0


def _cmd_bisim(args, report: RunReport) -> int:
    case, model = _load_case_and_model(args)
    report.model_hash = model.content_hash()
    if args.other is not None:
        other = load_model(args.other)
        if args.state is None or args.other_state is None:
            raise UsageError(
                "cross-model comparison needs --state and --other-state"
            )
        union, left_map, right_map = disjoint_union(model, other)
        first = left_map[args.state]
        second = right_map[args.other_state]
        union_for_formula = union
    else:
        if args.state is None and args.other_state is None:
            relation = bisim_mod.greatest_bisimulation(model)
            proper = sorted(
                (a, b) for a, b in relation if a < b
            )
            report.result["pairs"] = len(relation)
            report.result["distinct bisimilar pairs"] = "; ".join(
                "%s ~ %s" % pair for pair in proper
            ) or "(none)"
            return 0
        if args.state is None or args.other_state is None:
            raise UsageError("state comparison needs both --state and --other-state")
        union_for_formula = model
        first, second = args.state, args.other_state
    relation = bisim_mod.greatest_bisimulation(union_for_formula)
    related = (first, second) in relation or (second, first) in relation
    report.result["states"] = "%s vs %s" % (args.state, args.other_state)
    report.result["bisimilar"] = related
    if not related:
        witness = bisim_mod.distinguishing_formula(
            union_for_formula, first, second
        )
        report.result["distinguished by"] = str(witness)
    return 0


def _cmd_translate(args, report: RunReport) -> int:
    case = None
    phi = _resolve_formula(args, case)
    report.formula = str(phi)
    report.result["mu-calculus"] = str(to_mu(phi))
    return 0


def _cmd_nf(args, report: RunReport) -> int:
    phi = _resolve_formula(args, None)
    report.formula = str(phi)
    report.result["normal form"] = str(normal_form(phi))
    return 0


def _cmd_unfold(args, report: RunReport) -> int:
    phi = _resolve_formula(args, None)
    assignment = _strategic_assignment(phi)
    unfolded, _ = unfold(assignment)
    report.formula = str(phi)
    report.result["unfolding"] = str(unfolded)
    return 0


def _cmd_ind(args, report: RunReport) -> int:
    phi = _resolve_formula(args, None)
    assignment = _strategic_assignment(phi)
    target = parse_state_formula(args.target)
    report.formula = str(phi)
    report.result["target"] = str(target)
    report.result["induction formula"] = str(
        induction_formula(assignment, target)
    )
    return 0


def _cmd_oplus(args, report: RunReport) -> int:
    phi = _resolve_formula(args, None)
    assignment = _strategic_assignment(phi)
    extended = nexttime_extension(assignment)
    report.formula = str(phi)
    report.result["nexttime extension"] = str(strategic(extended))
    report.counters["entries"] = len(extended)
    return 0


def _cmd_onestep_sat(args, report: RunReport) -> int:
    sequent_doc = _load_json(args.sequent)
    formulas = [
        parse_state_formula(text) for text in sequent_doc["formulas"]
    ]
    sequent = onestep_mod.sequent_from_formulas(
        formulas,
        agents=sequent_doc.get("agents"),
        variables=sequent_doc.get("variables"),
    )
    constraint_doc = _load_json(args.constraint)
    family = constraint_doc["family"]
    variables = constraint_doc.get("variables")
    if variables is None:
        variables = sorted(
            set(sequent.variables) | {v for member in family for v in member}
        )
    constraint = onestep_mod.SatConstraint.over(variables, family)
    verdict = onestep_mod.sequent_satisfiable(sequent, constraint)
    report.result["agents"] = ",".join(sequent.agents)
    report.result["variables"] = ",".join(sequent.variables)
    report.result["constraint"] = "; ".join(
        "{%s}" % ",".join(sorted(member)) for member in constraint.family
    )
    report.result["satisfiable"] = bool(verdict)
    if verdict:
        form = onestep_mod.witness_game_form(sequent, constraint)
        problems = onestep_mod.validate_game_form(form, sequent, constraint)
        report.result["witness actions"] = len(form.actions)
        report.result["witness validated"] = not problems
    elif verdict.certificate is not None:
        report.result["certificate"] = str(verdict.certificate)
    report.counters["positives"] = len(sequent.positives)
    report.counters["negatives"] = len(sequent.negatives)
    return 0


def _cmd_stability(args, report: RunReport) -> int:
    case, model = _load_case_and_model(args)
    state = _resolve_state(args, case)
    assignment = _strategic_assignment(_resolve_formula(args, case, "goals"))
    report.model_hash = model.content_hash()
    report.formula = str(strategic(assignment))
    report.result["state"] = state
    report.result["notion"] = args.notion

    if args.notion == "coeq":
        restricted = stability_mod.coequilibrium_ga(assignment, model.agents)
        report.result["restricted goals"] = str(strategic(restricted))
        report.result["co-equilibrium exists"] = check_with_stats(
            model, state, strategic(restricted)
        ).holds
        if args.profile:
            profile = _load_profile(args.profile)
            ok, _ = verify_witness(model, state, profile, restricted)
            report.result["profile witnesses it"] = ok
        return 0

    if args.profile is None:
        raise UsageError("--profile is required for notion %s" % args.notion)
    profile = _load_profile(args.profile)
    partition = stability_mod.partition_outcomes(
        model, state, profile, assignment
    )
    report.result["winning coalitions"] = "; ".join(
        str(c) for c in partition.winning_coalitions
    ) or "(none)"
    report.result["losing coalitions"] = "; ".join(
        str(c) for c in partition.losing_coalitions
    ) or "(none)"

    if args.notion == "core":
        phi = stability_mod.core_membership_formula(
            assignment, sorted(partition.losers)
        )
        report.result["membership formula"] = str(phi)
        report.result["in core"] = check_with_stats(model, state, phi).holds
        return 0

    builder = {
        "nash": stability_mod.nash_ga,
        "strong": stability_mod.strong_ga,
        "coalitional": stability_mod.coalitional_ga,
    }[args.notion]
    derived = builder(assignment, partition, model.agents)
    report.result["derived goals"] = str(strategic(derived))
    ok, _ = verify_witness(model, state, profile, derived)
    report.result["stable"] = ok
    if args.notion == "nash":
        try:
            improver = stability_mod.has_unilateral_improvement(
                model, state, profile, assignment
            )
        except ValueError:
            pass
        else:
            report.result["improving agent"] = improver or "(none)"
    return 0


def _cmd_axioms(args, report: RunReport) -> int:
    wanted = args.schemes.split(",") if args.schemes else list(_SCHEMES)
    bad = 0
    for scheme in wanted:
        if scheme not in _SCHEMES:
            raise ValueError("unknown scheme %r" % scheme)
        found = falsify_scheme(
            scheme, args.samples, seed=args.seed, max_states=args.max_states
        )
        if found is None:
            report.result[scheme] = "ok (%d samples)" % args.samples
        else:
            bad += 1
            report.result[scheme] = str(found)
    report.counters["schemes"] = len(wanted)
    report.counters["counterexamples"] = bad
    return 0


def _cmd_corpus(args, report: RunReport) -> int:
    if args.list:
        report.result["cases"] = "; ".join(corpus_mod.case_names())
        return 0
    if not args.build:
        raise UsageError("corpus needs --list or --build NAME")
    if not args.out:
        raise UsageError("--build needs --out DIRECTORY")
    case = corpus_mod.build_case(args.build, **_parse_params(args.params))
    written = corpus_mod.write_case(case, args.out)
    report.model_hash = case.model.content_hash()
    report.result["case"] = case.name
    report.result["start"] = case.start
    report.result["written"] = "; ".join(written)
    return 0


# ---------------------------------------------------------------- wiring


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tlcga", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    def add(name, handler, helptext):
        p = sub.add_parser(name, help=helptext, add_help=True)
        p.set_defaults(handler=handler)
        _common_flags(p)
        return p

    p = add("check", _cmd_check, "truth of a formula at a state")
    _model_source(p)
    _formula_source(p)
    p.add_argument("--state", default=None)

    p = add("oracle", _cmd_oracle, "search a memory class for a witness")
    _model_source(p)
    _formula_source(p)
    p.add_argument("--state", default=None)
    p.add_argument("--mode", required=True, help="positional, path:K, play:K")
    p.add_argument("--limit", type=int, default=100000)
    p.add_argument("--save-witness", default=None,
                   help="write a found profile as JSON here")

    p = add("validate", _cmd_validate, "verify a recorded strategy profile")
    _model_source(p)
    _formula_source(p)
    p.add_argument("--state", default=None)
    p.add_argument("--witness", required=True, help="profile JSON file")

    p = add("scos", _cmd_scos, "state-copying outcome-splitting transform")
    _model_source(p)
    p.add_argument("--out", default=None, help="write the split model here")

    p = add("bisim", _cmd_bisim, "bisimulation relation and distinctions")
    _model_source(p)
    p.add_argument("--other", default=None, help="second model JSON file")
    p.add_argument("--state", default=None)
    p.add_argument("--other-state", default=None)

    p = add("translate", _cmd_translate, "translate to the fixpoint dialect")
    _formula_source(p)

    p = add("nf", _cmd_nf, "rewrite to nexttime/long-term normal form")
    _formula_source(p)

    p = add("unfold", _cmd_unfold, "one-step unfolding of an assignment")
    _formula_source(p)

    p = add("ind", _cmd_ind, "induction formula with an explicit target")
    _formula_source(p)
    p.add_argument("--target", required=True, help="target state formula")

    p = add("oplus", _cmd_oplus, "nexttime extension of an assignment")
    _formula_source(p)

    p = add("onestep-sat", _cmd_onestep_sat, "one-step satisfiability")
    p.add_argument("--sequent", required=True, help="sequent JSON file")
    p.add_argument("--constraint", required=True, help="constraint JSON file")

    p = add("stability", _cmd_stability, "solution-concept constructions")
    _model_source(p)
    p.add_argument(
        "--notion",
        required=True,
        choices=("nash", "strong", "coalitional", "coeq", "core"),
    )
    _formula_source(p, "--goals")
    p.add_argument("--state", default=None)
    p.add_argument("--profile", default=None, help="profile JSON file")

    p = add("axioms", _cmd_axioms, "randomized scheme falsification")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--schemes", default=None, help="comma-separated subset")
    p.add_argument("--max-states", type=int, default=4)

    p = add("corpus", _cmd_corpus, "list or build the example registry")
    p.add_argument("--list", action="store_true")
    p.add_argument("--build", default=None, help="case name")
    p.add_argument("--params", default=None, help="k=v,k=v case parameters")
    p.add_argument("--out", default=None, help="output directory")

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "handler", None):
            raise UsageError("a subcommand is required")
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
    except UsageError as err:
        print("usage error: %s" % err, file=sys.stderr)
        return 1

    report = RunReport(
        command="tlcga " + " ".join(shlex.quote(piece) for piece in argv),
        seed=args.seed,
    )
    started = time.perf_counter()
    try:
        code = args.handler(args, report)
    except UsageError as err:
        print("usage error: %s" % err, file=sys.stderr)
        return 1
    except ResourceLimitError as err:
        print("resource limit: %s" % err, file=sys.stderr)
        return 3
    except (ValueError, OSError, KeyError) as err:
        print("invalid input: %s" % err, file=sys.stderr)
        return 2
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    print(report.to_json_text() if args.json else report.to_text())
    print("time: %.1f ms" % elapsed_ms, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
