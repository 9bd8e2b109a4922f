"""Command-line front end.

Subcommands: bracket, cobracket, mu, verify, homology, deform, expand,
compare.  All numeric output is exact ("p/q" strings); reports are JSON
(sorted keys) or a plain table.  Identical arguments and seed produce
byte-identical output.  Exit codes: 0 success, 1 verification failure,
2 usage error.
"""

import argparse
import json
import sys
from fractions import Fraction

from . import words as W
from .complexes import AlgCobracket, AlgComodule, ChainVector, wedge_basis
from .deform import (
    DeformationElement,
    DeformedCobracket,
    DeformedComodule,
    check_cojacobi,
    homotopy_check,
    verify_deformation_invariance,
)
from .errors import NecklacesError, ParseError
from .expansion import (
    Expansion,
    compare_expansions,
    loop_tensor,
    parse_group_word,
    symplectic_expansion,
)
from .homology import HomologyEngine, homology_report
from .lie import (
    BiDerivationElem,
    DerivationElem,
    TensorDerivElem,
    algebra,
    bracket,
    mu_alg,
    schedler_delta,
)
from .tensors import Tensor
from .verify import bialgebra_suite, bimodule_suite, matrix_identity_suite


# -- element grammar ----------------------------------------------------------
#
#   element  := [sign] term { sign term }
#   term     := [coeff] (necklace | word | "1")
#   necklace := "N(" letters ")"
#   word     := letters            (space-separated a<i>/b<i>)
#   coeff    := integer or p/q
#
# Terms must be all-necklace or all-word; the result is a DerivationElem
# or a Tensor accordingly.


def _tokenize(text: str):
    # offsets are 1-based character positions, as reported in errors
    tokens = []  # (kind, value, offset)
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-":
            tokens.append(("sign", ch, i + 1))
            i += 1
        elif ch == "N" and i + 1 < n and text[i + 1] == "(":
            j = text.find(")", i + 2)
            if j < 0:
                raise ParseError("unclosed 'N('", n + 1)
            tokens.append(("necklace", text[i + 2 : j], i + 1))
            i = j + 1
        elif ch.isdigit():
            j = i
            while j < n and (text[j].isdigit() or text[j] == "/"):
                j += 1
            tokens.append(("number", text[i:j], i + 1))
            i = j
        elif ch in "ab":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise ParseError(f"letter {ch!r} needs an index", i + 1)
            tokens.append(("letter", text[i:j], i + 1))
            i = j
        else:
            raise ParseError(f"unexpected character {ch!r}", i + 1)
    return tokens


def parse_element(text: str, g: int):
    """Parse an element of the tensor algebra or of the necklace algebra."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty element", 0)
    terms = []  # (coeff, kind, payload)
    pos = 0
    sign = 1
    while pos < len(tokens):
        kind, value, off = tokens[pos]
        if kind == "sign":
            sign = 1 if value == "+" else -1
            pos += 1
            if pos >= len(tokens):
                raise ParseError("dangling sign", off)
            kind, value, off = tokens[pos]
        coeff = Fraction(sign)
        if kind == "number":
            try:
                coeff = sign * Fraction(value)
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad rational {value!r}", off) from None
            pos += 1
        if pos < len(tokens) and tokens[pos][0] == "necklace":
            word = W.parse_word(tokens[pos][1])
            if not word:
                raise ParseError("empty necklace", tokens[pos][2])
            terms.append((coeff, "necklace", word))
            pos += 1
        elif pos < len(tokens) and tokens[pos][0] == "letter":
            letters = []
            while pos < len(tokens) and tokens[pos][0] == "letter":
                letters.append(W.parse_letter(tokens[pos][1], tokens[pos][2]))
                pos += 1
            terms.append((coeff, "word", tuple(letters)))
        else:
            # a bare coefficient: the unit word
            terms.append((coeff, "word", ()))
        sign = 1
        if pos < len(tokens) and tokens[pos][0] not in ("sign",):
            raise ParseError("expected '+' or '-' between terms", tokens[pos][2])
    kinds = {k for _, k, _ in terms}
    if kinds == {"necklace"}:
        acc: dict = {}
        for c, _, wd in terms:
            cw = W.canonical_rotation(wd)
            acc[cw] = acc.get(cw, 0) + c
        return DerivationElem(g, acc)
    if "necklace" in kinds:
        raise ParseError("cannot mix necklaces and plain words", 0)
    acc = {}
    for c, _, wd in terms:
        acc[wd] = acc.get(wd, 0) + c
    return Tensor(g, acc)


def parse_wedge(text: str, g: int) -> ChainVector:
    """Parse a 2-vector like 'N(a1)^N(b1) - 2 N(a1 a1)^N(b1 b1)'."""
    ctx = algebra(g)
    raw_terms = []
    weight = None
    for chunk_sign, chunk in _split_signed(text):
        parts = chunk.split("^")
        if len(parts) != 2:
            raise ParseError("wedge terms need exactly one '^'", 0)
        head = parts[0].strip()
        coeff = Fraction(chunk_sign)
        if not head.startswith("N("):
            cut = head.find("N(")
            if cut < 0:
                raise ParseError(f"expected N(...) in {chunk!r}", 0)
            coeff *= Fraction(head[:cut].strip() or "1")
            head = head[cut:]
        first = _parse_necklace_text(head)
        second = _parse_necklace_text(parts[1].strip())
        wgt = len(first) + len(second)
        if weight is None:
            weight = wgt
        elif weight != wgt:
            raise ParseError("wedge terms have different total weights", 0)
        ia, ib = ctx.index_of_word(first), ctx.index_of_word(second)
        if ia == ib:
            continue
        if ia > ib:
            ia, ib = ib, ia
            coeff = -coeff
        raw_terms.append(((ia, ib), coeff))
    if weight is None:
        raise ParseError("empty wedge element", 0)
    return ChainVector.from_terms(wedge_basis(g, 2, weight), raw_terms)


def _split_signed(text: str):
    out = []
    sign = 1
    cur = []
    depth = 0
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-" and cur and cur[-1] not in "(^":
            chunk = "".join(cur).strip()
            if chunk:
                out.append((sign, chunk))
            sign = 1 if ch == "+" else -1
            cur = []
        else:
            cur.append(ch)
    chunk = "".join(cur).strip()
    if chunk:
        out.append((sign, chunk))
    return out


def _parse_necklace_text(text: str) -> W.WordKey:
    text = text.strip()
    if not text.startswith("N(") or not text.endswith(")"):
        raise ParseError(f"expected N(...), got {text!r}", 0)
    word = W.parse_word(text[2:-1])
    if not word:
        raise ParseError("empty necklace", 0)
    return W.canonical_rotation(word)


def parse_range(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    v = int(text)
    return v, v


# -- handles from flags ----------------------------------------------------------


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def delta_handle_from_flag(flag: str, g: int):
    if flag == "alg":
        return AlgCobracket(g)
    if flag.startswith("deformed:"):
        data = _load_json(flag.split(":", 1)[1])
        elem = DeformationElement.from_json_dict(data)
        return DeformedCobracket(g, [elem])
    raise ParseError(f"bad --delta value {flag!r}", 0)


def mu_handle_from_flag(flag: str, g: int):
    if flag == "alg":
        return AlgComodule(g)
    if flag.startswith("deformed:"):
        data = _load_json(flag.split(":", 1)[1])
        elem = DeformationElement.from_json_dict(data)
        return DeformedComodule(g, [elem])
    raise ParseError(f"bad --mu value {flag!r}", 0)


# -- rendering ---------------------------------------------------------------------


def _emit(data: dict, args) -> None:
    if args.format == "json":
        text = json.dumps(data, sort_keys=True, indent=2) + "\n"
    else:
        text = _render_table(data) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render_table(data, indent: str = "") -> str:
    lines = []
    if isinstance(data, dict):
        for key in sorted(data):
            val = data[key]
            if isinstance(val, (dict, list)):
                lines.append(f"{indent}{key}:")
                lines.append(_render_table(val, indent + "  "))
            else:
                lines.append(f"{indent}{key}: {val}")
    elif isinstance(data, list):
        for item in data:
            if isinstance(item, (dict, list)):
                lines.append(_render_table(item, indent + "  "))
                lines.append(indent + "  -")
            else:
                lines.append(f"{indent}- {item}")
    else:
        lines.append(f"{indent}{data}")
    return "\n".join(x for x in lines if x.strip())


def _element_json(val) -> dict:
    return val.to_json_dict()


# -- subcommand implementations ------------------------------------------------------


def _cmd_bracket(args) -> int:
    x = parse_element(args.elements[0], args.g)
    y = parse_element(args.elements[1], args.g)
    if not isinstance(x, DerivationElem) or not isinstance(y, DerivationElem):
        raise ParseError("bracket expects necklace elements N(...)", 0)
    _emit({"op": "bracket", "result": _element_json(bracket(x, y))}, args)
    return 0


def _cmd_cobracket(args) -> int:
    x = parse_element(args.element, args.g)
    if not isinstance(x, DerivationElem):
        raise ParseError("cobracket expects a necklace element", 0)
    handle = delta_handle_from_flag(args.delta, args.g)
    if isinstance(handle, AlgCobracket):
        result = schedler_delta(x)
    else:
        acc: dict = {}
        for nw, c in x.terms.items():
            for (wa, wb), c2 in handle.delta_word(nw).items():
                acc[(wa, wb)] = acc.get((wa, wb), 0) + c * c2
                acc[(wb, wa)] = acc.get((wb, wa), 0) - c * c2
        result = BiDerivationElem(args.g, acc)
    _emit({"op": "cobracket", "delta": args.delta, "result": _element_json(result)}, args)
    return 0


def _cmd_mu(args) -> int:
    x = parse_element(args.element, args.g)
    if not isinstance(x, Tensor):
        raise ParseError("mu expects a tensor element (plain words)", 0)
    handle = mu_handle_from_flag(args.mu, args.g)
    if isinstance(handle, AlgComodule):
        result = mu_alg(x)
    else:
        acc: dict = {}
        for wd, c in x.terms.items():
            for (w2, nk), c2 in handle.mu_word(wd).items():
                acc[(w2, nk)] = acc.get((w2, nk), 0) + c * c2
        result = TensorDerivElem(args.g, acc)
    _emit({"op": "mu", "mu": args.mu, "result": _element_json(result)}, args)
    return 0


def _cmd_verify(args) -> int:
    reports = []
    suites = (
        ["bialgebra", "bimodule", "ce-matrix", "module-matrix"]
        if args.suite == "all"
        else [args.suite]
    )
    pmax = args.p_max
    for name in suites:
        if name == "bialgebra":
            reports.append(bialgebra_suite(args.g, args.w_max, args.seed, args.samples))
        elif name == "bimodule":
            reports.append(bimodule_suite(args.g, args.w_max, args.seed, args.samples))
        elif name == "ce-matrix":
            reports.append(matrix_identity_suite(args.g, pmax, args.w_max, module=False))
        elif name == "module-matrix":
            reports.append(matrix_identity_suite(args.g, pmax, args.w_max, module=True))
        else:
            raise ParseError(f"unknown suite {name!r}", 0)
    ok = all(r["ok"] for r in reports)
    _emit({"seed": args.seed, "suites": reports, "ok": ok}, args)
    return 0 if ok else 1


def _cmd_homology(args) -> int:
    handle = delta_handle_from_flag(args.delta, args.g)
    if not isinstance(handle, AlgCobracket) and handle.deformations:
        raise ParseError(
            "homology needs a weight-homogeneous cobracket; deformed handles "
            "are compared via the deform subcommand",
            0,
        )
    mu = mu_handle_from_flag(args.mu, args.g) if args.module else None
    if args.module and not isinstance(mu, AlgComodule) and mu.deformations:
        raise ParseError("homology needs the canonical comodule; see deform", 0)
    engine = HomologyEngine(
        args.g,
        delta=AlgCobracket(args.g),
        mu=AlgComodule(args.g) if args.module else None,
        module=args.module,
    )
    rep = homology_report(
        engine, parse_range(args.p), parse_range(args.w), with_induced=not args.no_induced
    )
    rep["euler_ok"] = all(e["ok"] for e in rep["euler_checks"])
    _emit(rep, args)
    return 0 if rep["euler_ok"] else 1


def _cmd_deform(args) -> int:
    if args.A_file:
        a_chain = DeformationElement.from_json_dict(_load_json(args.A_file)).chain
    elif args.A:
        a_chain = parse_wedge(args.A, args.g)
    else:
        raise ParseError("deform needs --A or --A-file", 0)
    a = DeformationElement(a_chain)
    report: dict = {
        "g": args.g,
        "A": a.to_json_dict(),
        "in_kernel": a.in_n,
        "seed": args.seed,
    }
    lie_cells = [tuple(c) for c in (json.loads(args.cells) if args.cells else [[1, 3], [2, 4]])]
    if args.check_lemma31 or args.check_all:
        hom_ok = all(homotopy_check(a, p, w) for (p, w) in lie_cells)
        report["homotopy_identity"] = hom_ok
        if not a.in_n:
            report["invariance"] = "skipped: A not in the kernel"
            _emit(report, args)
            return 0 if hom_ok else 1
        delta_handle = DeformedCobracket(args.g, [a])
        report["cojacobi"] = check_cojacobi(delta_handle, args.w_max)
        b = DeformationElement(a.chain.scale(-1))
        inv = verify_deformation_invariance(
            [a],
            [b],
            lie_cells=lie_cells,
            mod_cells=[tuple(c) for c in json.loads(args.mod_cells)] if args.mod_cells else [],
            check_weight=args.w_max,
            require_cojacobi=False,
        )
        report["invariance"] = inv
        ok = hom_ok and inv["ok"]
        _emit(report, args)
        return 0 if ok else 1
    _emit(report, args)
    return 0


def _cmd_expand(args) -> int:
    theta = symplectic_expansion(args.g, args.degree)
    rep = theta.to_json_dict()
    rep["checks"] = {
        "normalization": theta.check_normalization(),
        "grouplike": theta.check_grouplike(),
        "boundary": theta.check_boundary(),
    }
    _emit(rep, args)
    return 0 if all(rep["checks"].values()) else 1


def _cmd_compare(args) -> int:
    th1 = Expansion.from_json_dict(_load_json(args.theta[0]))
    th2 = Expansion.from_json_dict(_load_json(args.theta[1]))
    u = compare_expansions(th1, th2)
    _emit({"op": "compare", "u": u.to_json_dict()}, args)
    return 0


def _cmd_loop(args) -> int:
    theta = Expansion.from_json_dict(_load_json(args.theta))
    word = parse_group_word(args.word)
    _emit({"op": "loop", "word": args.word, "result": loop_tensor(theta, word).to_json_dict()}, args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="necklaces",
        description=(
            "Exact computations in the necklace Lie bialgebra of symplectic "
            "derivations: brackets, cobrackets, weight-graded homology, "
            "coboundary deformations, symplectic expansions."
        ),
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        p.add_argument("--g", type=int, default=1, help="genus (>= 1)")
        p.add_argument("--format", choices=("json", "table"), default="json")
        if out:
            p.add_argument("--out", help="write the report to this file")

    p = sub.add_parser("bracket", help="Lie bracket of two necklace elements")
    common(p)
    p.add_argument("elements", nargs=2, help="e.g. 'N(a1 a1)' 'N(b1)'")
    p.set_defaults(func=_cmd_bracket)

    p = sub.add_parser("cobracket", help="cobracket of a necklace element")
    common(p)
    p.add_argument("element")
    p.add_argument("--delta", default="alg", help="alg or deformed:<file>")
    p.set_defaults(func=_cmd_cobracket)

    p = sub.add_parser("mu", help="comodule splitting of a tensor element")
    common(p)
    p.add_argument("element")
    p.add_argument("--mu", default="alg", help="alg or deformed:<file>")
    p.set_defaults(func=_cmd_mu)

    p = sub.add_parser("verify", help="run an identity suite")
    common(p)
    p.add_argument(
        "--suite",
        default="all",
        choices=("bialgebra", "bimodule", "ce-matrix", "module-matrix", "all"),
    )
    p.add_argument("--w-max", type=int, default=6)
    p.add_argument("--p-max", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=25)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("homology", help="weight-graded homology report")
    common(p)
    p.add_argument("--p", default="0..3", help="chain degree range, e.g. 0..3")
    p.add_argument("--w", default="0..6", help="weight range, e.g. 0..6")
    p.add_argument("--delta", default="alg")
    p.add_argument("--mu", default="alg")
    p.add_argument("--module", action="store_true", help="coefficients in the tensor algebra")
    p.add_argument("--no-induced", action="store_true")
    p.set_defaults(func=_cmd_homology)

    p = sub.add_parser("deform", help="deformation checks for a 2-vector")
    common(p)
    p.add_argument("--A", help="wedge element, e.g. 'N(a1)^N(b1)'")
    p.add_argument("--A-file", help="JSON file with the 2-vector")
    p.add_argument("--cells", help="JSON list of [p,w] cells")
    p.add_argument("--mod-cells", help="JSON list of module [p,w] cells")
    p.add_argument("--w-max", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check-lemma31", action="store_true",
                   help="homotopy identity + induced-map invariance")
    p.add_argument("--check-all", action="store_true")
    p.set_defaults(func=_cmd_deform)

    p = sub.add_parser("expand", help="construct a symplectic expansion")
    common(p)
    p.add_argument("--degree", type=int, required=True, help="weight cutoff D >= 2")
    p.set_defaults(func=_cmd_expand)

    p = sub.add_parser("compare", help="change-of-expansion derivation")
    common(p)
    p.add_argument("theta", nargs=2, help="two expansion JSON files")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("loop", help="cyclic invariant of a free-group word")
    common(p)
    p.add_argument("--theta", required=True, help="expansion JSON file")
    p.add_argument("--word", required=True, help="e.g. 'x1 x2^-1'")
    p.set_defaults(func=_cmd_loop)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NecklacesError as exc:
        print(f"error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
