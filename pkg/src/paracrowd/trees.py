"""Constituency parse trees in bracket notation, and syntactic patterns.

Trees arrive as bracket expressions produced by an external parser, e.g.
``(S (NP (PRP I)) (VP (VBP run)))``.  A *pattern* is the truncation of a
tree to its root label plus the ordered labels of its immediate children,
serialized canonically: ``(S (NP) (VP))``.  Exact string equality of the
canonical form is the only pattern-matching notion used anywhere in the
pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptyInput, MalformedNode, UnbalancedBrackets

# Depth of the truncation that defines a pattern: root level plus one.
PATTERN_DEPTH = 2

# Outermost wrapper label that parsers disagree about; unwrapped once on
# ingestion so exact matching is comparable across parser origins.
ROOT_WRAPPER_LABEL = "ROOT"


@dataclass(frozen=True)
class ParseTree:
    """One node of a labeled ordered tree.

    Internal nodes carry ``children`` (at least one); leaves carry a surface
    ``token``.  A node never has both, never neither.
    """

    label: str
    children: tuple["ParseTree", ...] = ()
    token: str | None = None

    def __post_init__(self):
        if not self.label or any(c in self.label for c in " \t\n()"):
            raise MalformedNode(f"bad label {self.label!r}")
        if self.token is not None and self.children:
            raise MalformedNode(f"node {self.label!r} has both token and children")
        if self.token is None and not self.children:
            raise MalformedNode(f"node {self.label!r} has neither token nor children")

    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    def tokens(self) -> list[str]:
        """Surface tokens in left-to-right order."""
        if self.is_leaf:
            return [self.token]  # type: ignore[list-item]
        out: list[str] = []
        for child in self.children:
            out.extend(child.tokens())
        return out

    def serialize(self) -> str:
        if self.is_leaf:
            return f"({self.label} {self.token})"
        inner = " ".join(child.serialize() for child in self.children)
        return f"({self.label} {inner})"


@dataclass(frozen=True)
class SyntaxPattern:
    """Root label plus ordered child labels; keyed by its canonical string."""

    root: str
    child_labels: tuple[str, ...] = ()
    canonical: str = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "canonical", _canonical(self.root, self.child_labels))


def _canonical(root: str, child_labels: tuple[str, ...]) -> str:
    if not child_labels:
        return f"({root})"
    inner = " ".join(f"({label})" for label in child_labels)
    return f"({root} {inner})"


def serialize_pattern(pattern: SyntaxPattern) -> str:
    """Canonical single-space form, injective over (root, child labels)."""
    return pattern.canonical


def extract_pattern(tree: ParseTree) -> SyntaxPattern:
    """Truncate a tree to its top two levels.

    A leaf root yields a pattern with no child labels.
    """
    return SyntaxPattern(tree.label, tuple(child.label for child in tree.children))


def pattern_of(tree: ParseTree) -> str:
    """Canonical pattern string of a tree; shorthand used throughout."""
    return extract_pattern(tree).canonical


def _tokenize_brackets(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse_bracketed(text: str, unwrap_root: bool = True) -> ParseTree:
    """Read a single bracket expression into a ParseTree.

    Whitespace between symbols is insignificant.  When ``unwrap_root`` is
    set and the outermost node is labeled ``ROOT`` with exactly one child,
    that wrapper is removed once.
    """
    if text is None or not text.strip():
        raise EmptyInput("no bracket expression given")
    tokens = _tokenize_brackets(text)
    tree, index = _parse_node(tokens, 0)
    if index != len(tokens):
        raise UnbalancedBrackets(f"trailing content after tree: {tokens[index:]!r}")
    if unwrap_root and tree.label == ROOT_WRAPPER_LABEL and len(tree.children) == 1:
        tree = tree.children[0]
    return tree


def _parse_node(tokens: list[str], index: int) -> tuple[ParseTree, int]:
    if index >= len(tokens) or tokens[index] != "(":
        raise UnbalancedBrackets("expected '('")
    index += 1
    if index >= len(tokens):
        raise UnbalancedBrackets("input ends after '('")
    label = tokens[index]
    if label in ("(", ")"):
        raise MalformedNode("node label missing")
    index += 1

    children: list[ParseTree] = []
    words: list[str] = []
    while index < len(tokens) and tokens[index] != ")":
        if tokens[index] == "(":
            child, index = _parse_node(tokens, index)
            children.append(child)
        else:
            words.append(tokens[index])
            index += 1
    if index >= len(tokens):
        raise UnbalancedBrackets(f"missing ')' for node {label!r}")
    index += 1  # consume ')'

    if children and words:
        raise MalformedNode(f"node {label!r} mixes subtrees and bare tokens")
    if not children and len(words) != 1:
        if not words:
            raise MalformedNode(f"node {label!r} has neither subtree nor token")
        raise MalformedNode(f"leaf {label!r} carries multiple tokens {words!r}")
    if children:
        return ParseTree(label, tuple(children)), index
    return ParseTree(label, (), words[0]), index
