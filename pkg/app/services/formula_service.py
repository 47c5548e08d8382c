"""Formula parsing, printing and rewriting"""
import dataclasses
import logging
import re
from functools import lru_cache
from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple

from app.core.exceptions import FormulaSyntaxError, InputError
from app.models.formula import (
    CONSTANTS, FALSE, TRUE, And, Atom, Exists, ForAll, Formula, FragmentClass,
    Next, Not, Or, Release, Strategic, Until,
)
from app.models.icgs import ICGS

logger = logging.getLogger(__name__)

KEYWORDS = frozenset({"X", "F", "G", "U", "R"})

_TOKEN_RE = re.compile(r"<<|>>|\[\[|\]\]|&&|\|\||[()!&|,]|[A-Za-z0-9_]+")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _tokenize(text: str) -> List[Tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN_RE.match(text, pos)
        if not match:
            raise FormulaSyntaxError(f"Unexpected character {text[pos]!r}", pos, text)
        tokens.append((match.group(0), pos))
        pos = match.end()
    return tokens


class _Parser:
    """
    Recursive descent over the grammar (low to high precedence):
    `|`, `&`, `U`/`R` (right associative), unary `X F G !` and quantifiers.
    """

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def _peek(self) -> Optional[str]:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def _pos(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def _advance(self) -> str:
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def _expect(self, tok: str) -> None:
        if self._peek() != tok:
            found = self._peek() or "end of input"
            raise FormulaSyntaxError(f"Expected {tok!r}, found {found!r}", self._pos(), self.text)
        self.i += 1

    def parse(self) -> Formula:
        if not self.tokens:
            raise FormulaSyntaxError("Empty formula", 0, self.text)
        f = self._or()
        if self._peek() is not None:
            raise FormulaSyntaxError(f"Unexpected token {self._peek()!r}", self._pos(), self.text)
        return f

    def _or(self) -> Formula:
        left = self._and()
        while self._peek() in ("|", "||"):
            self._advance()
            left = Or(left, self._and())
        return left

    def _and(self) -> Formula:
        left = self._until()
        while self._peek() in ("&", "&&"):
            self._advance()
            left = And(left, self._until())
        return left

    def _until(self) -> Formula:
        left = self._unary()
        tok = self._peek()
        if tok == "U":
            self._advance()
            return Until(left, self._until())
        if tok == "R":
            self._advance()
            return Release(left, self._until())
        return left

    def _coalition(self, closing: str) -> frozenset:
        agents = []
        while self._peek() != closing:
            tok = self._peek()
            if tok is None or not (tok[0].isalnum() or tok[0] == "_"):
                raise FormulaSyntaxError(f"Expected agent name or {closing!r}", self._pos(), self.text)
            agents.append(self._advance())
            if self._peek() == ",":
                self._advance()
            elif self._peek() != closing:
                raise FormulaSyntaxError(f"Expected ',' or {closing!r}", self._pos(), self.text)
        self._advance()
        return frozenset(agents)

    def _unary(self) -> Formula:
        tok = self._peek()
        if tok == "!":
            self._advance()
            return Not(self._unary())
        if tok == "X":
            self._advance()
            return Next(self._unary())
        if tok == "F":
            self._advance()
            return Until(TRUE, self._unary())
        if tok == "G":
            self._advance()
            return Release(FALSE, self._unary())
        if tok == "<<":
            self._advance()
            coalition = self._coalition(">>")
            return Exists(coalition, self._unary())
        if tok == "[[":
            self._advance()
            coalition = self._coalition("]]")
            return ForAll(coalition, self._unary())
        return self._primary()

    def _primary(self) -> Formula:
        tok = self._peek()
        if tok is None:
            raise FormulaSyntaxError("Unexpected end of input", self._pos(), self.text)
        if tok == "(":
            self._advance()
            inner = self._or()
            self._expect(")")
            return inner
        if tok in KEYWORDS or not (tok[0].isalnum() or tok[0] == "_"):
            raise FormulaSyntaxError(f"Unexpected token {tok!r}", self._pos(), self.text)
        self._advance()
        return Atom(tok)


@lru_cache(maxsize=1024)
def parse(text: str) -> Formula:
    """Parse formula text; agent names are checked later, against a model"""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printing and JSON
# ---------------------------------------------------------------------------

def _is_eventually(f: Formula) -> bool:
    return isinstance(f, Until) and f.left == TRUE


def _is_globally(f: Formula) -> bool:
    return isinstance(f, Release) and f.left == FALSE


def _precedence(f: Formula) -> int:
    if isinstance(f, Atom):
        return 5
    if isinstance(f, (Not, Next, Exists, ForAll)) or _is_eventually(f) or _is_globally(f):
        return 4
    if isinstance(f, (Until, Release)):
        return 3
    if isinstance(f, And):
        return 2
    return 1


def _wrap(f: Formula, minimum: int) -> str:
    text = format_formula(f)
    return text if _precedence(f) >= minimum else f"({text})"


def format_formula(f: Formula) -> str:
    """Pretty-print with minimal parentheses; `parse` inverts it exactly"""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "!" + _wrap(f.operand, 4)
    if isinstance(f, Next):
        return "X " + _wrap(f.operand, 4)
    if _is_eventually(f):
        return "F " + _wrap(f.right, 4)
    if _is_globally(f):
        return "G " + _wrap(f.right, 4)
    if isinstance(f, Exists):
        return f"<<{','.join(sorted(f.coalition))}>> " + _wrap(f.body, 4)
    if isinstance(f, ForAll):
        return f"[[{','.join(sorted(f.coalition))}]] " + _wrap(f.body, 4)
    if isinstance(f, Until):
        return f"{_wrap(f.left, 4)} U {_wrap(f.right, 3)}"
    if isinstance(f, Release):
        return f"{_wrap(f.left, 4)} R {_wrap(f.right, 3)}"
    if isinstance(f, And):
        return f"{_wrap(f.left, 2)} & {_wrap(f.right, 3)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left, 1)} | {_wrap(f.right, 2)}"
    raise TypeError(f"Unknown formula node: {f!r}")


_NODE_TYPES = {cls.__name__: cls for cls in (Atom, Not, And, Or, Exists, ForAll, Next, Until, Release)}


def formula_to_json(f: Formula) -> Dict[str, Any]:
    """JSON AST mirroring node class names"""
    node: Dict[str, Any] = {"node": type(f).__name__}
    for fld in dataclasses.fields(f):
        value = getattr(f, fld.name)
        if isinstance(value, Formula):
            node[fld.name] = formula_to_json(value)
        elif isinstance(value, frozenset):
            node[fld.name] = sorted(value)
        else:
            node[fld.name] = value
    return node


def formula_from_json(data: Dict[str, Any]) -> Formula:
    try:
        cls = _NODE_TYPES[data["node"]]
    except (KeyError, TypeError):
        raise InputError(f"Unknown formula node in JSON AST: {data!r}")
    kwargs = {}
    for fld in dataclasses.fields(cls):
        if fld.name not in data:
            raise InputError(f"Missing field {fld.name!r} in {data['node']} node")
        value = data[fld.name]
        if fld.name == "coalition":
            kwargs[fld.name] = frozenset(value)
        elif fld.name == "name":
            kwargs[fld.name] = str(value)
        else:
            kwargs[fld.name] = formula_from_json(value)
    return cls(**kwargs)


# ---------------------------------------------------------------------------
# Structure
# ---------------------------------------------------------------------------

def walk(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal"""
    yield f
    for child in f.children():
        yield from walk(child)


def atoms_of(f: Formula) -> frozenset:
    """Proposition names, excluding the true/false constants"""
    return frozenset(n.name for n in walk(f) if isinstance(n, Atom) and n.name not in CONSTANTS)


def agents_of(f: Formula) -> frozenset:
    found: set = set()
    for n in walk(f):
        if isinstance(n, Strategic):
            found |= n.coalition
    return frozenset(found)


@lru_cache(maxsize=4096)
def height(f: Formula) -> int:
    kids = f.children()
    return 0 if not kids else 1 + max(height(c) for c in kids)


def size(f: Formula) -> int:
    return sum(1 for _ in walk(f))


def has_strategic(f: Formula) -> bool:
    return any(isinstance(n, Strategic) for n in walk(f))


def subformulas(f: Formula) -> List[Formula]:
    """Distinct subtrees bottom-up: by height, then by printed text"""
    distinct = set(walk(f))
    return sorted(distinct, key=lambda g: (height(g), format_formula(g)))


def is_nnf(f: Formula) -> bool:
    return all(isinstance(n.operand, Atom) for n in walk(f) if isinstance(n, Not))


def is_atl_state(f: Formula) -> bool:
    """State formula of the ATL fragment: one temporal operator per quantifier"""
    if isinstance(f, Atom):
        return True
    if isinstance(f, Not):
        return is_atl_state(f.operand)
    if isinstance(f, (And, Or)):
        return is_atl_state(f.left) and is_atl_state(f.right)
    if isinstance(f, Strategic):
        body = f.body
        if isinstance(body, Next):
            return is_atl_state(body.operand)
        if isinstance(body, (Until, Release)):
            return is_atl_state(body.left) and is_atl_state(body.right)
        return False
    return False


def classify(f: Formula) -> FragmentClass:
    if not has_strategic(f):
        return FragmentClass.LTL
    if is_atl_state(f):
        return FragmentClass.ATL
    return FragmentClass.ATL_STAR


# ---------------------------------------------------------------------------
# Transformations
# ---------------------------------------------------------------------------

def _negate(f: Formula) -> Formula:
    """NNF of the negation of `f`"""
    if f == TRUE:
        return FALSE
    if f == FALSE:
        return TRUE
    if isinstance(f, Atom):
        return Not(f)
    if isinstance(f, Not):
        return to_nnf(f.operand)
    if isinstance(f, And):
        return Or(_negate(f.left), _negate(f.right))
    if isinstance(f, Or):
        return And(_negate(f.left), _negate(f.right))
    if isinstance(f, Next):
        return Next(_negate(f.operand))
    if isinstance(f, Until):
        return Release(_negate(f.left), _negate(f.right))
    if isinstance(f, Release):
        return Until(_negate(f.left), _negate(f.right))
    if isinstance(f, Exists):
        return ForAll(f.coalition, _negate(f.body))
    if isinstance(f, ForAll):
        return Exists(f.coalition, _negate(f.body))
    raise TypeError(f"Unknown formula node: {f!r}")


def to_nnf(f: Formula) -> Formula:
    """Push negations down to atoms"""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return _negate(f.operand)
    if isinstance(f, (And, Or, Until, Release)):
        return type(f)(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Next):
        return Next(to_nnf(f.operand))
    if isinstance(f, (Exists, ForAll)):
        return type(f)(f.coalition, to_nnf(f.body))
    raise TypeError(f"Unknown formula node: {f!r}")


def map_formula(f: Formula, fn) -> Formula:
    """Rebuild `f` bottom-up, applying `fn` to every rebuilt node"""
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, (Not, Next)):
        return fn(type(f)(map_formula(f.operand, fn)))
    if isinstance(f, (And, Or, Until, Release)):
        return fn(type(f)(map_formula(f.left, fn), map_formula(f.right, fn)))
    if isinstance(f, (Exists, ForAll)):
        return fn(type(f)(f.coalition, map_formula(f.body, fn)))
    raise TypeError(f"Unknown formula node: {f!r}")


def strip_strategic(f: Formula) -> Formula:
    """Erase every quantifier, keeping its body"""
    return map_formula(f, lambda n: n.body if isinstance(n, Strategic) else n)


def rewrite_coalitions(f: Formula, target: Iterable[str]) -> Formula:
    """Turn every quantifier into <<target>> (grand or empty coalition variants)"""
    coalition = frozenset(target)
    return map_formula(f, lambda n: Exists(coalition, n.body) if isinstance(n, Strategic) else n)


def replace_subformula(f: Formula, target: Formula, atom: str) -> Formula:
    """Replace every occurrence of `target` in `f` by Atom(atom)"""
    if f == target:
        return Atom(atom)
    if isinstance(f, Atom):
        return f
    if isinstance(f, (Not, Next)):
        return type(f)(replace_subformula(f.operand, target, atom))
    if isinstance(f, (And, Or, Until, Release)):
        return type(f)(replace_subformula(f.left, target, atom), replace_subformula(f.right, target, atom))
    return type(f)(f.coalition, replace_subformula(f.body, target, atom))


def fresh_name(base: str, taken: Iterable[str]) -> str:
    """`base`, or `base_1`, `base_2`, ... if already taken"""
    taken = set(taken)
    if base not in taken:
        return base
    k = 1
    while f"{base}_{k}" in taken:
        k += 1
    return f"{base}_{k}"


def negated_atom_names(m: ICGS, f: Formula) -> Dict[str, str]:
    """Fresh positive atom for each atom occurring negated in `f`: q -> not_q"""
    negated = sorted({n.operand.name for n in walk(f) if isinstance(n, Not) and isinstance(n.operand, Atom)} - CONSTANTS)
    taken = set(m.atoms) | set(CONSTANTS)
    fresh: Dict[str, str] = {}
    for q in negated:
        name = fresh_name(f"not_{q}", taken)
        if name != f"not_{q}":
            logger.info(f"[Preprocessing] Atom not_{q} already exists, using {name}")
        fresh[q] = name
        taken.add(name)
    return fresh


def eliminate_negated_atoms(m: ICGS, f: Formula) -> Tuple[ICGS, Formula]:
    """
    Replace every literal !q of an NNF formula by a fresh positive atom
    labelled exactly where q does not hold.
    """
    if not is_nnf(f):
        raise InputError("eliminate_negated_atoms expects a formula in negation normal form")

    fresh = negated_atom_names(m, f)
    negated = sorted(fresh)

    def substitute(n: Formula) -> Formula:
        if isinstance(n, Not):
            if n.operand in (TRUE, FALSE):
                return FALSE if n.operand == TRUE else TRUE
            return Atom(fresh[n.operand.name])
        return n

    if not fresh:
        return m, map_formula(f, substitute)

    labeling = {
        s: m.label(s) | frozenset(fresh[q] for q in negated if q not in m.label(s))
        for s in m.states
    }
    model = dataclasses.replace(
        m,
        atoms=tuple(m.atoms) + tuple(fresh[q] for q in negated),
        labeling=labeling,
    )
    return model, map_formula(f, substitute)


def preprocess(m: ICGS, f: Formula) -> Tuple[ICGS, Formula]:
    """NNF followed by negated-atom elimination"""
    return eliminate_negated_atoms(m, to_nnf(f))


def bind_formula(m: ICGS, f: Formula) -> None:
    """Check atoms and coalition members of `f` against a model"""
    unknown_atoms = atoms_of(f) - set(m.atoms)
    if unknown_atoms:
        raise InputError(f"Formula mentions unknown atom(s): {', '.join(sorted(unknown_atoms))}")
    unknown_agents = agents_of(f) - set(m.agents)
    if unknown_agents:
        raise InputError(f"Formula mentions unknown agent(s): {', '.join(sorted(unknown_agents))}")
