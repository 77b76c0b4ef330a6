"""Command-line front end: ``tplogic SUBCOMMAND ...``.

Exit codes: 0 verdict true or suite clean, 1 verdict false or failures found,
2 parse or usage error, 3 universe or fragment error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from typing import List, Optional, Sequence

from .enumerate import EnumeratorSpec
from .properties import (
    NotChaliceFragment,
    PropertyReport,
    is_intuitionistic,
    is_pure,
    is_self_framing,
    is_substitutable,
    is_supported,
    is_syntactically_self_framing,
)
from .semantics import NonObjectDeref, NotSLFragment, UnboundVar, count_models, entails, equivalent, models, tpl_sat
from .state import (
    State,
    StateError,
    StateParseError,
    Universe,
    UniverseError,
    default_universe,
    load_universe,
    parse_state,
    render_perm,
    render_state,
    render_value,
)
from .suites import DEFAULT_SPECS, SUITE_NAMES, UnknownSuite, run_suite
from .syntax import Acc, Assertion, ParseError, PointsTo, fields_used, parse_assertion, render, subformulas
from .translation import NotRestrictedSL, NotSupported, check_translation, sl_to_chalice
from .vc import Exhale, Inhale, Interp, NotChaliceBool, eval_pred, parse_command, render_pred, wp_ch, wp_sl

OK, FALSE_VERDICT, USAGE, FRAGMENT = 0, 1, 2, 3


class Output:
    """Collects lines for plain text and a dict for ``--json``."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.lines: List[str] = []
        self.data: dict = {}

    def line(self, text: str):
        self.lines.append(text)

    def emit(self, stream=None):
        stream = stream or sys.stdout
        if self.as_json:
            json.dump(self.data, stream, indent=2, sort_keys=True)
            stream.write("\n")
        else:
            for text in self.lines:
                stream.write(text + "\n")


def _universe(args) -> Universe:
    return load_universe(args.universe) if args.universe else default_universe()


def _assertion(text: str, u: Optional[Universe]) -> Assertion:
    a = parse_assertion(text)
    if u is not None:
        for s in subformulas(a):
            if isinstance(s, (Acc, PointsTo)) and not u.on_grid(s.perm):
                raise UniverseError(f"permission {render_perm(s.perm)} is not on the grid 1/{u.denom}")
        unknown = sorted(fields_used(a) - set(u.fields))
        if unknown:
            raise UniverseError(f"field {unknown[0]!r} is not in the universe")
    return a


def _heap_text(h, u: Universe) -> str:
    return " ".join(f"{loc}={render_value(h[loc])}" for loc in u.locations)


def _mask_text(m, u: Universe) -> str:
    return " ".join(f"{loc}={render_perm(m[loc])}" for loc in u.locations if m[loc]) or "(empty)"


def _verdict(out: Output, holds: bool, witness: Optional[State], u: Universe, detail: str = "") -> int:
    out.line("true" if holds else "false")
    out.data["verdict"] = holds
    if witness is not None:
        out.line(f"witness: {render_state(witness, u)}")
        out.data["witness"] = render_state(witness, u)
    if detail:
        out.line(f"detail: {detail}")
        out.data["detail"] = detail
    return OK if holds else FALSE_VERDICT


# -- subcommands ---------------------------------------------------------------------------


def cmd_eval(args, out: Output) -> int:
    u = _universe(args)
    s = parse_state(args.state, u)
    a = _assertion(args.assertion, u)
    return _verdict(out, tpl_sat(s, a, u), None, u)


CHECKS = {
    "pure": is_pure,
    "selfframing": is_self_framing,
    "supported": is_supported,
    "intuitionistic": is_intuitionistic,
    "synframing": is_syntactically_self_framing,
}


def cmd_check(args, out: Output) -> int:
    u = _universe(args)
    a = _assertion(args.assertion, u)
    if args.property == "substitutable":
        return _verdict(out, is_substitutable(a), None, u)
    rep: PropertyReport = CHECKS[args.property](a, u)
    code = _verdict(out, rep.verdict, rep.witness, u, rep.detail)
    if rep.interfering is not None:
        out.line(f"interfering heap: {_heap_text(rep.interfering, u)}")
        out.data["interfering_heap"] = _heap_text(rep.interfering, u)
    if rep.other_mask is not None:
        out.line(f"other mask: {_mask_text(rep.other_mask, u)}")
        out.data["other_mask"] = _mask_text(rep.other_mask, u)
    return code


def cmd_entail(args, out: Output) -> int:
    u = _universe(args)
    v = entails(_assertion(args.left, u), _assertion(args.right, u), u)
    return _verdict(out, v.holds, v.witness, u, v.detail)


def cmd_equiv(args, out: Output) -> int:
    u = _universe(args)
    v = equivalent(_assertion(args.left, u), _assertion(args.right, u), u)
    return _verdict(out, v.holds, v.witness, u, v.detail)


def cmd_translate(args, out: Output) -> int:
    if args.reverse:
        raise NotSupported("translating implicit dynamic frames into separation logic is not supported")
    u = _universe(args) if args.check else None
    a = _assertion(args.assertion, u)
    target = sl_to_chalice(a).target
    out.line(render(target))
    out.data["target"] = render(target)
    if not args.check:
        return OK
    rep = check_translation(a, u)
    out.line(f"equivalent: {'true' if rep.verdict else 'false'}")
    out.data["equivalent"] = rep.verdict
    if rep.witness is not None:
        out.line(f"witness: {render_state(rep.witness, u)}")
        out.data["witness"] = render_state(rep.witness, u)
    return OK if rep.verdict else FALSE_VERDICT


def cmd_wp(args, out: Output) -> int:
    u = _universe(args)
    cmd = parse_command(args.command)
    post = _assertion(args.assertion, u)
    if args.calculus == "sl":
        if not isinstance(cmd, (Inhale, Exhale)):
            raise NotChaliceFragment("wp_sl is defined for a single inhale or exhale")
        w = wp_sl(cmd, post)
        text = render(w)
        holds = (lambda s: tpl_sat(s, w, u)) if args.state else None
    else:
        w = wp_ch(cmd, Interp(post))
        text = render_pred(w)
        holds = (lambda s: eval_pred(w, s, u)) if args.state else None
    out.line(text)
    out.data["wp"] = text
    if holds is None:
        return OK
    s = parse_state(args.state, u)
    value = bool(holds(s))
    out.line(f"at state: {'true' if value else 'false'}")
    out.data["verdict"] = value
    return OK if value else FALSE_VERDICT


def cmd_models(args, out: Output) -> int:
    u = _universe(args)
    a = _assertion(args.assertion, u)
    if args.list:
        states = [render_state(s, u) for s in models(a, u)]
        for s in states:
            out.line(s)
        out.data["models"] = states
        out.data["count"] = len(states)
        return OK if states else FALSE_VERDICT
    n = count_models(a, u)
    out.line(str(n))
    out.data["count"] = n
    return OK if n else FALSE_VERDICT


def cmd_suite(args, out: Output) -> int:
    u = _universe(args)
    spec: EnumeratorSpec = DEFAULT_SPECS.get(args.name) or EnumeratorSpec()
    if args.depth is not None:
        spec = spec.with_depth(args.depth)
    if args.deref_depth is not None:
        spec = replace(spec, deref_depth=args.deref_depth)
    label = args.universe or "U0"
    rep = run_suite(args.name, spec, u, paranoid=args.paranoid, universe_label=label)
    out.lines.extend(rep.lines())
    out.data.update(rep.to_json())
    return OK if rep.ok else FALSE_VERDICT


# -- parser --------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-u", "--universe", help="universe file (default: built-in U0)")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = _Parser(prog="tplogic", description="Finite-model checker for total-heap permission logic.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", parents=[common], help="evaluate an assertion at a state")
    e.add_argument("-s", "--state", required=True)
    e.add_argument("-a", "--assertion", required=True)
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("check", parents=[common], help="decide an assertion property")
    c.add_argument("property", choices=["pure", "selfframing", "supported", "substitutable", "intuitionistic", "synframing"])
    c.add_argument("-a", "--assertion", required=True)
    c.set_defaults(func=cmd_check)

    for name, func, text in (("entail", cmd_entail, "decide LEFT |= RIGHT"), ("equiv", cmd_equiv, "decide LEFT == RIGHT")):
        q = sub.add_parser(name, parents=[common], help=text)
        q.add_argument("left")
        q.add_argument("right")
        q.set_defaults(func=func)

    t = sub.add_parser("translate", parents=[common], help="restricted separation logic to Chalice")
    t.add_argument("-a", "--assertion", required=True)
    t.add_argument("--check", action="store_true", help="also check equivalence on the universe")
    t.add_argument("--reverse", action="store_true", help="Chalice to separation logic (not supported)")
    t.set_defaults(func=cmd_translate)

    w = sub.add_parser("wp", parents=[common], help="weakest precondition of a command")
    w.add_argument("calculus", choices=["sl", "chalice"])
    w.add_argument("-c", "--command", required=True)
    w.add_argument("-a", "--assertion", required=True, help="postcondition")
    w.add_argument("-s", "--state", help="also evaluate the precondition here")
    w.set_defaults(func=cmd_wp)

    m = sub.add_parser("models", parents=[common], help="count or list models")
    m.add_argument("-a", "--assertion", required=True)
    g = m.add_mutually_exclusive_group()
    g.add_argument("--count", action="store_true", help="print the number of models (default)")
    g.add_argument("--list", action="store_true", help="print every model")
    m.set_defaults(func=cmd_models)

    s = sub.add_parser("suite", parents=[common], help="run a theorem suite")
    s.add_argument("name", help=", ".join(SUITE_NAMES))
    s.add_argument("--depth", type=int)
    s.add_argument("--deref-depth", type=int)
    s.add_argument("--paranoid", action="store_true", help="cross-check minimality exhaustively")
    s.set_defaults(func=cmd_suite)
    return p


FRAGMENT_ERRORS = (
    UniverseError,
    StateError,
    NotChaliceFragment,
    NotChaliceBool,
    NotSLFragment,
    NotRestrictedSL,
    NotSupported,
    NonObjectDeref,
)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    out = Output(args.json)
    try:
        code = args.func(args, out)
    except (ParseError, StateParseError, UnboundVar, UnknownSuite, OSError) as exc:
        sys.stderr.write(f"error: {_message(exc)}\n")
        return USAGE
    except FRAGMENT_ERRORS as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return FRAGMENT
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE
    out.emit()
    return code


def _message(exc: BaseException) -> str:
    if isinstance(exc, UnknownSuite):
        return f"unknown suite {exc.args[0]!r}; choose from {', '.join(SUITE_NAMES)}"
    return str(exc)


if __name__ == "__main__":
    raise SystemExit(main())
