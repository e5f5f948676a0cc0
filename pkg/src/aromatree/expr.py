"""Surface expression language: parser, sort checking, canonical printing.

Grammar (whitespace separates juxtaposed items; rationals are n or n/m):

    expr       := term (("+" | "-") term)*
    term       := ["-"] [rational] atom
    atom       := call | marked | literal | "(" expr ")"
    call       := name "(" expr ("," expr)* ")"
    name       := graft | bracket | rho | delta | tdelta | tau | compose
                | gl | div
    marked     := "(" address "," int "," literal ")"
    literal    := [multiaroma | aroma+] lie | word | "1"
    multiaroma := "{" aroma ("," aroma)* "}"
    aroma      := "cyc(" spoke (" | " spoke)* ")"
    spoke      := [label] "@" int "[" tree* "]"
    lie        := tree | "[" lie "," lie "]"
    word       := lie ("." lie)+
    tree       := label ("[" tree+ "]")?

Sorts: lie / sa / apt / u / endo / one.  Evaluation promotes lie to apt or
(for aroma-free elements) to the word algebra; "1" is the polymorphic unit
of the word algebra and the aroma ring.
"""

from __future__ import annotations

import json as _json
import re
from dataclasses import dataclass
from fractions import Fraction

from . import GRAMMAR_VERSION, __version__
from .apt import APTElement, APTKey, apt_bracket, apt_graft, rho_apt
from .aromas import (
    MA_UNIT,
    MultiAroma,
    PlanarAroma,
    SAElement,
    SA_ONE,
    Spoke,
    multiaroma_mul,
)
from .freelie import (
    EMPTY_WORD,
    LyndonWord,
    U_ONE,
    Word,
    embed,
    gl_product,
    lie_normal_form,
)
from .linear import LinComb
from .marked import Endo, MarkedElement, OmegaElement, omega_compose, parse_mark, tau
from .trees import PlanarTree

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<cyc>cyc\()
  | (?P<addr>(?:r|c\d+)(?:\.\d+)+|r(?![A-Za-z_0-9]))
  | (?P<rat>\d+(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<star>\*)
  | (?P<punct>[()\[\]{},.@|+\-])
    """,
    re.VERBOSE,
)

CALLS = {"graft", "bracket", "rho", "delta", "tdelta", "tau", "compose", "gl", "div"}


class ExprError(ValueError):
    def __init__(self, msg: str, pos: int, text: str):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{msg} at line {line}, column {col}")
        self.pos = pos


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ExprError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(0), pos))
        pos = m.end()
    out.append(Token("eof", "", len(text)))
    return out


@dataclass(frozen=True)
class Value:
    """A sorted value: sort in {lie, sa, apt, u, endo, one}."""

    sort: str
    payload: object

    def __repr__(self):
        return f"<{self.sort}: {print_value(self)}>"


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text:
            raise ExprError(f"expected {text!r}, found {t.text or 'end of input'!r}",
                            t.pos, self.text)
        return t

    def fail(self, msg: str) -> ExprError:
        t = self.peek()
        return ExprError(msg, t.pos, self.text)

    # -- grammar -------------------------------------------------------------

    def parse(self) -> Value:
        v = self.expr()
        t = self.peek()
        if t.kind != "eof":
            raise self.fail(f"trailing input {t.text!r}")
        return v

    def expr(self) -> Value:
        v = self.term()
        while self.peek().text in ("+", "-"):
            op = self.next().text
            rhs = self.term()
            other = rhs if op == "+" else scale_value(Fraction(-1), rhs)
            v = add_values(v, other)
        return v

    def term(self) -> Value:
        sign = Fraction(1)
        if self.peek().text == "-":
            self.next()
            sign = Fraction(-1)
        coeff = Fraction(1)
        if self._rat_is_coeff():
            coeff = _parse_rat(self.next().text)
        v = self.atom()
        c = sign * coeff
        return v if c == 1 else scale_value(c, v)

    def _rat_is_coeff(self) -> bool:
        if self.peek().kind != "rat":
            return False
        nxt = self.peek(1)
        return nxt.kind in ("star", "name", "cyc", "addr") or nxt.text in ("[", "{", "(")

    def atom(self) -> Value:
        t = self.peek()
        if t.kind == "name" and t.text in CALLS and self.peek(1).text == "(":
            return self.call()
        if t.text == "(":
            if self.peek(1).kind == "addr" and self.peek(2).text == ",":
                return self.marked()
            self.next()
            v = self.expr()
            self.expect(")")
            return v
        if t.kind == "rat":
            if t.text == "1":
                self.next()
                return Value("one", None)
            if t.text == "0":
                self.next()
                return Value("zero", None)
            raise self.fail(f"a bare number {t.text!r} is not a value")
        return self.literal()

    def call(self) -> Value:
        name = self.next().text
        self.expect("(")
        args = [self.expr()]
        while self.peek().text == ",":
            self.next()
            args.append(self.expr())
        self.expect(")")
        return eval_call(name, args, self)

    def marked(self) -> Value:
        self.expect("(")
        addr_tok = self.next()
        mark = parse_mark(addr_tok.text)
        self.expect(",")
        slot_tok = self.next()
        if slot_tok.kind != "rat" or "/" in slot_tok.text:
            raise ExprError("expected a slot number", slot_tok.pos, self.text)
        self.expect(",")
        carrier = self.literal()
        self.expect(")")
        apt = as_apt(carrier, self)
        if len(apt) != 1:
            raise self.fail("a marked element needs a single carrier term")
        key, c = apt.items()[0]
        if c != 1:
            raise self.fail("a marked element carrier must have coefficient 1")
        if len(key.lie) != 1:
            raise self.fail("a marked element carrier must be a tree, not a bracket")
        from .marked import make_marked

        try:
            m = make_marked(
                key.aromas.factors, key.lie.letters[0], mark, int(slot_tok.text)
            )
        except (ValueError, IndexError) as exc:
            raise ExprError(str(exc), addr_tok.pos, self.text) from exc
        return Value("endo", LinComb.single(m))

    def literal(self) -> Value:
        aromas: list[PlanarAroma] = []
        t = self.peek()
        if t.text == "{":
            self.next()
            aromas.append(self.aroma())
            while self.peek().text == ",":
                self.next()
                aromas.append(self.aroma())
            self.expect("}")
        else:
            while self.peek().kind == "cyc":
                aromas.append(self.aroma())
        here = self.peek()
        if (
            here.kind in ("star", "name")
            or here.text == "["
            or (here.kind == "addr" and here.text == "r")
        ):
            lie = self.lie()
            letters = [lie]
            while self.peek().text == ".":
                self.next()
                letters.append(self.lie())
            if len(letters) > 1:
                wrds = _lie_list_to_word(letters)
                if aromas:
                    raise self.fail("words do not take aroma coefficients")
                return Value("u", wrds)
            key_part = lie
            if aromas:
                apt = key_part.map_keys(
                    lambda k: LinComb.single(APTKey(MultiAroma(tuple(aromas)), k))
                )
                return Value("apt", apt)
            return Value("lie", key_part)
        if aromas:
            return Value("sa", LinComb.single(MultiAroma(tuple(aromas))))
        raise self.fail("expected a value")

    def aroma(self) -> PlanarAroma:
        t = self.next()
        if t.kind != "cyc":
            raise ExprError("expected an aroma", t.pos, self.text)
        spokes = [self.spoke()]
        while self.peek().text == "|":
            self.next()
            spokes.append(self.spoke())
        self.expect(")")
        return PlanarAroma(tuple(spokes))

    def spoke(self) -> Spoke:
        label = "*"
        if self.peek().kind in ("name", "star") or (
            self.peek().kind == "addr" and self.peek().text == "r"
        ):
            label = self.next().text
        self.expect("@")
        pos_tok = self.next()
        if pos_tok.kind != "rat" or "/" in pos_tok.text:
            raise ExprError("expected a cycle position", pos_tok.pos, self.text)
        self.expect("[")
        children = []
        while self.peek().text != "]":
            children.append(self.tree())
        self.expect("]")
        try:
            return Spoke(label, int(pos_tok.text), tuple(children))
        except ValueError as exc:
            raise ExprError(str(exc), pos_tok.pos, self.text) from exc

    def lie(self) -> LinComb:
        t = self.peek()
        if t.text == "[":
            self.next()
            left = self.lie()
            self.expect(",")
            right = self.lie()
            self.expect("]")
            from .freelie import lie_bracket

            return lie_bracket(left, right)
        return LinComb.single(LyndonWord((self.tree(),)))

    def tree(self) -> PlanarTree:
        t = self.next()
        if t.kind not in ("star", "name") and not (t.kind == "addr" and t.text == "r"):
            raise ExprError("expected a vertex label", t.pos, self.text)
        label = t.text
        children = []
        if self.peek().text == "[":
            self.next()
            while self.peek().text != "]":
                children.append(self.tree())
            self.expect("]")
        return PlanarTree(label, tuple(children))


def _lie_list_to_word(letters: list[LinComb]) -> LinComb:
    out = U_ONE
    from .freelie import concat_product

    for l in letters:
        out = concat_product(out, embed(l))
    return out


def _parse_rat(s: str) -> Fraction:
    if "/" in s:
        n, d = s.split("/")
        return Fraction(int(n), int(d))
    return Fraction(int(s))


# -- sort promotion and operations --------------------------------------------


def as_apt(v: Value, p: Parser | None = None) -> APTElement:
    if v.sort == "apt":
        return v.payload
    if v.sort == "lie":
        return v.payload.map_keys(lambda k: LinComb.single(APTKey(MA_UNIT, k)))
    if v.sort == "zero":
        return LinComb.zero()
    raise _sort_error(f"expected an aromatic-tree value, got {v.sort}", p)


def as_sa(v: Value, p: Parser | None = None) -> SAElement:
    if v.sort == "sa":
        return v.payload
    if v.sort == "one":
        return SA_ONE
    if v.sort == "zero":
        return LinComb.zero()
    raise _sort_error(f"expected a ring value, got {v.sort}", p)


def as_u(v: Value, p: Parser | None = None) -> LinComb:
    if v.sort == "u":
        return v.payload
    if v.sort == "one":
        return U_ONE
    if v.sort == "zero":
        return LinComb.zero()
    if v.sort == "lie":
        return embed(v.payload)
    if v.sort == "apt":
        out = LinComb.zero()
        for k, c in v.payload.terms.items():
            if not k.aromas.is_unit():
                raise _sort_error("word-algebra values cannot carry aromas", p)
            out = out + embed(LinComb.single(k.lie)).scale(c)
        return out
    raise _sort_error(f"expected a word-algebra value, got {v.sort}", p)


def as_endo(v: Value, p: Parser | None = None):
    if v.sort == "endo":
        return v.payload
    raise _sort_error(f"expected an endomorphism value, got {v.sort}", p)


def _sort_error(msg: str, p: Parser | None):
    if p is not None:
        return p.fail(f"sort error: {msg}")
    return ExprError(f"sort error: {msg}", 0, "")


def _endo_to_omega(payload) -> OmegaElement:
    if isinstance(payload, Endo):
        return payload.to_omega()
    return payload


def eval_call(name: str, args: list[Value], p: Parser | None = None) -> Value:
    def arity(n):
        if len(args) != n:
            raise _sort_error(f"{name} takes {n} argument(s), got {len(args)}", p)

    if name == "graft":
        arity(2)
        return Value("apt", apt_graft(as_apt(args[0], p), as_apt(args[1], p)))
    if name == "bracket":
        arity(2)
        return Value("apt", apt_bracket(as_apt(args[0], p), as_apt(args[1], p)))
    if name == "rho":
        arity(2)
        return Value("sa", rho_apt(as_apt(args[0], p), as_sa(args[1], p)))
    if name == "delta":
        arity(1)
        from .marked import delta as _delta

        return Value("endo", _delta(as_apt(args[0], p)))
    if name == "tdelta":
        arity(1)
        from .marked import tilde_delta as _tdelta

        return Value("endo", _tdelta(as_apt(args[0], p)))
    if name == "tau":
        arity(1)
        payload = as_endo(args[0], p)
        try:
            return Value("sa", tau(_endo_to_omega(payload)))
        except ValueError as exc:
            raise _sort_error(str(exc), p) from exc
    if name == "compose":
        arity(2)
        a, b = as_endo(args[0], p), as_endo(args[1], p)
        if isinstance(a, Endo) and isinstance(b, Endo):
            return Value("endo", a.compose(b))
        try:
            return Value("endo", omega_compose(_endo_to_omega(a), _endo_to_omega(b)))
        except ValueError as exc:
            raise _sort_error(str(exc), p) from exc
    if name == "gl":
        arity(2)
        return Value("u", gl_product(as_u(args[0], p), as_u(args[1], p)))
    if name == "div":
        arity(1)
        from .marked import divergence

        try:
            return Value("sa", divergence(as_apt(args[0], p)))
        except ValueError as exc:
            raise _sort_error(str(exc), p) from exc
    raise _sort_error(f"unknown operation {name}", p)


def add_values(a: Value, b: Value) -> Value:
    sa, sb = a.sort, b.sort
    if sa == "zero":
        return b
    if sb == "zero":
        return a
    if sa == "one" or sb == "one":
        return Value("u", as_u(a) + as_u(b))
    if sa == sb and sa in ("lie", "sa", "apt", "u"):
        return Value(sa, a.payload + b.payload)
    if sa == sb == "endo":
        pa, pb = a.payload, b.payload
        if isinstance(pa, Endo) and isinstance(pb, Endo):
            return Value("endo", pa + pb)
        return Value("endo", _endo_to_omega(pa) + _endo_to_omega(pb))
    if {sa, sb} == {"lie", "apt"}:
        return Value("apt", as_apt(a) + as_apt(b))
    if {sa, sb} <= {"lie", "u", "apt"}:
        return Value("u", as_u(a) + as_u(b))
    raise ExprError(f"sort error: cannot add {sa} and {sb}", 0, "")


def scale_value(c: Fraction, v: Value) -> Value:
    if v.sort == "zero":
        return v
    if v.sort == "one":
        return Value("u", U_ONE.scale(c))
    if v.sort == "endo":
        return Value("endo", v.payload.scale(c))
    return Value(v.sort, v.payload.scale(c))


def parse(text: str) -> Value:
    return Parser(text).parse()


# -- canonical printing --------------------------------------------------------


def _coeff_prefix(c: Fraction) -> tuple[str, str]:
    sign = "-" if c < 0 else "+"
    mag = -c if c < 0 else c
    return sign, ("" if mag == 1 else f"{mag} ")


def _print_comb(comb: LinComb, key_fn) -> str:
    if not comb:
        return "0"
    parts = []
    for k, c in comb.items():
        sign, mag = _coeff_prefix(c)
        parts.append((sign, f"{mag}{key_fn(k)}"))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _print_apt_key(k: APTKey) -> str:
    return k.enc


def _print_word(w: Word) -> str:
    return w.enc


def _print_ma(m: MultiAroma) -> str:
    return m.enc


def print_value(v: Value) -> str:
    if v.sort == "one":
        return "1"
    if v.sort == "lie":
        return _print_comb(v.payload, lambda k: k.enc)
    if v.sort == "apt":
        return _print_comb(v.payload, _print_apt_key)
    if v.sort == "sa":
        return _print_comb(v.payload, _print_ma)
    if v.sort == "u":
        return _print_comb(v.payload, _print_word)
    if v.sort == "endo":
        p = v.payload
        if isinstance(p, Endo):
            return _print_comb(
                p.chains,
                lambda chain: " o ".join(
                    ("d(" if kind == "d" else "td(") + key.enc + ")"
                    for kind, key in chain
                ),
            )
        return _print_comb(p, lambda m: m.enc)
    raise ValueError(f"unknown sort {v.sort}")


# -- renderers ------------------------------------------------------------------


def render(v: Value, fmt: str) -> str:
    if fmt == "text":
        return print_value(v)
    if fmt == "json":
        return _json.dumps(
            {
                "version": __version__,
                "grammar": GRAMMAR_VERSION,
                "sort": v.sort,
                "text": print_value(v),
            },
            indent=2,
            sort_keys=True,
        )
    if fmt == "latex":
        return render_latex(v)
    if fmt == "dot":
        return render_dot(v)
    raise ValueError(f"unknown format {fmt!r}")


def _tree_latex(t: PlanarTree) -> str:
    body = "".join(_tree_latex(c) for c in t.children)
    label = "\\bullet" if t.label == "*" else t.label
    return f"[{{${label}$}}{body}]"


def _aroma_latex(a: PlanarAroma) -> str:
    spokes = []
    for s in a.spokes:
        kids = " ".join(_tree_latex(c) for c in s.children)
        label = "\\bullet" if s.label == "*" else s.label
        spokes.append(f"{label}@{s.cycle_pos}[{kids}]")
    return "\\mathrm{cyc}\\left(" + " \\mid ".join(spokes) + "\\right)"


def _latex_key(k) -> str:
    if isinstance(k, APTKey):
        aromas = "" if k.aromas.is_unit() else _ma_latex(k.aromas) + "\\,"
        return aromas + _lyndon_latex(k.lie)
    if isinstance(k, MultiAroma):
        return _ma_latex(k)
    if isinstance(k, LyndonWord):
        return _lyndon_latex(k)
    if isinstance(k, Word):
        if not k.letters:
            return "\\mathbf{1}"
        return "\\,".join("\\forest " + _tree_latex(t) for t in k.letters)
    if isinstance(k, MarkedElement):
        return "(" + k.enc + ")"
    return str(k)


def _ma_latex(m: MultiAroma) -> str:
    if m.is_unit():
        return "\\mathbf{1}"
    return "\\,".join(_aroma_latex(a) for a in m.factors)


def _lyndon_latex(k: LyndonWord) -> str:
    def go(letters):
        if len(letters) == 1:
            return "\\forest " + _tree_latex(letters[0])
        from .freelie import std_factorization

        u, v = std_factorization(letters)
        return "\\left[" + go(u) + "," + go(v) + "\\right]"

    return go(k.letters)


def render_latex(v: Value) -> str:
    if v.sort == "one":
        return "1"
    comb = v.payload
    if v.sort == "endo" and isinstance(comb, Endo):
        comb = comb.chains
    if not comb:
        return "0"
    parts = []
    for k, c in comb.items():
        sign, mag = _coeff_prefix(c)
        parts.append((sign, f"{mag}{_latex_key(k)}"))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def render_dot(v: Value) -> str:
    """DOT digraph; tree edges point child -> parent, cycle edges are dashed."""
    lines = ["digraph value {", '  rankdir="BT";']
    counter = [0]

    def node(label: str) -> str:
        counter[0] += 1
        name = f"n{counter[0]}"
        lines.append(f'  {name} [label="{label}"];')
        return name

    def emit_tree(t: PlanarTree) -> str:
        me = node(t.label)
        for c in t.children:
            lines.append(f"  {emit_tree(c)} -> {me};")
        return me

    def emit_aroma(a: PlanarAroma):
        spoke_nodes = []
        for s in a.spokes:
            me = node(s.label)
            spoke_nodes.append(me)
            for c in s.children:
                lines.append(f"  {emit_tree(c)} -> {me};")
        m = len(spoke_nodes)
        for i, sn in enumerate(spoke_nodes):
            target = spoke_nodes[(i - 1) % m]
            lines.append(f"  {sn} -> {target} [style=dashed];")

    def emit_key(k):
        if isinstance(k, APTKey):
            for a in k.aromas.factors:
                emit_aroma(a)
            for w in k.lie.letters:
                emit_tree(w)
        elif isinstance(k, MultiAroma):
            for a in k.factors:
                emit_aroma(a)
        elif isinstance(k, LyndonWord):
            for w in k.letters:
                emit_tree(w)
        elif isinstance(k, Word):
            for w in k.letters:
                emit_tree(w)
        elif isinstance(k, MarkedElement):
            for a in k.aromas.factors:
                emit_aroma(a)
            emit_tree(k.tree)

    if v.sort == "one":
        lines.append('  unit [label="1"];')
    else:
        comb = v.payload
        if v.sort == "endo" and isinstance(comb, Endo):
            comb = comb.chains
        for idx, (k, c) in enumerate(comb.items()):
            lines.append(f"  subgraph cluster_{idx} {{")
            lines.append(f'    label="{c}";')
            start = len(lines)
            emit_key(k)
            # indent the emitted block for readability
            for j in range(start, len(lines)):
                lines[j] = "  " + lines[j]
            lines.append("  }")
    lines.append("}")
    return "\n".join(lines)
