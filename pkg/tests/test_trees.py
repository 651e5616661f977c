import pytest
from hypothesis import given, strategies as st

from paracrowd.errors import EmptyInput, MalformedNode, UnbalancedBrackets
from paracrowd.trees import (
    ParseTree,
    SyntaxPattern,
    extract_pattern,
    parse_bracketed,
    pattern_of,
    serialize_pattern,
)


def test_parse_simple_sentence():
    tree = parse_bracketed("(S (NP (PRP I)) (VP (VBP run)))")
    assert tree.label == "S"
    assert [c.label for c in tree.children] == ["NP", "VP"]
    np = tree.children[0]
    assert np.children[0].label == "PRP"
    assert np.children[0].token == "I"


def test_parse_minimal_leaf():
    tree = parse_bracketed("(X hi)")
    assert tree.label == "X"
    assert tree.token == "hi"
    assert tree.is_leaf


def test_parse_ignores_extra_whitespace():
    a = parse_bracketed("(S (NP (PRP I)) (VP (VBP run)))")
    b = parse_bracketed("  ( S\n( NP ( PRP I ) )\t( VP ( VBP run ) ) ) ")
    assert a == b


def test_unbalanced_raises():
    with pytest.raises(UnbalancedBrackets):
        parse_bracketed("(S (NP")
    with pytest.raises(UnbalancedBrackets):
        parse_bracketed("(S (NP (PRP I)) (VP (VBP run))) trailing")
    with pytest.raises(UnbalancedBrackets):
        parse_bracketed("(S (NP (PRP I)) (VP (VBP run)) ) )")


def test_empty_input_raises():
    with pytest.raises(EmptyInput):
        parse_bracketed("")
    with pytest.raises(EmptyInput):
        parse_bracketed("   \n ")


def test_malformed_nodes_raise():
    with pytest.raises(MalformedNode):
        parse_bracketed("(S ())")  # child with no label
    with pytest.raises(MalformedNode):
        parse_bracketed("(NP)")  # neither child nor token
    with pytest.raises(MalformedNode):
        parse_bracketed("(NP the dog)")  # leaf with two tokens
    with pytest.raises(MalformedNode):
        parse_bracketed("(NP the (NN dog))")  # mixes token and subtree


def test_root_wrapper_unwrapped_once():
    plain = parse_bracketed("(S (NP (PRP I)) (VP (VBP run)))")
    wrapped = parse_bracketed("(ROOT (S (NP (PRP I)) (VP (VBP run))))")
    assert wrapped == plain
    # only a single-child literal ROOT is unwrapped
    multi = parse_bracketed("(ROOT (S (NP (PRP I)) (VP (VBP run))) (X x))")
    assert multi.label == "ROOT"
    kept = parse_bracketed("(ROOT (S (NP (PRP I)) (VP (VBP run))))", unwrap_root=False)
    assert kept.label == "ROOT"


def test_extract_pattern_truncates_to_two_levels():
    tree = parse_bracketed(
        "(SBARQ (WHADVP (WRB Where)) (SQ (MD can) (NP (PRP we)) "
        "(VP (VB eat) (PP (IN in) (NP (NNP Milan))))) (. ?))"
    )
    assert pattern_of(tree) == "(SBARQ (WHADVP) (SQ) (.))"
    assert pattern_of(parse_bracketed("(S (NP (PRP I)) (VP (VBP run)))")) == "(S (NP) (VP))"
    assert pattern_of(parse_bracketed("(X hi)")) == "(X)"


def test_serialize_pattern_is_definitional():
    assert serialize_pattern(SyntaxPattern("S", ("NP", "VP", "."))) == "(S (NP) (VP) (.))"
    assert serialize_pattern(SyntaxPattern("X", ())) == "(X)"
    assert (
        SyntaxPattern("S", ("NP", "VP")).canonical
        != SyntaxPattern("S", ("VP", "NP")).canonical
    )


def test_pattern_ignores_everything_below_level_two():
    base = parse_bracketed("(S (NP (PRP I)) (VP (VBP run)))")
    swapped = parse_bracketed("(S (NP (NNP Milan)) (VP (VB eat) (NP (NN pizza))))")
    assert pattern_of(base) == pattern_of(swapped)


def test_tokens_in_order():
    tree = parse_bracketed("(S (NP (PRP I)) (VP (VBP run) (ADVP (RB fast))) (. .))")
    assert tree.tokens() == ["I", "run", "fast", "."]


labels = st.sampled_from(["S", "NP", "VP", "PP", "SQ", "WHNP", ".", ","])
tokens = st.text(alphabet="abcdefghijklmnopqrstuvwxyz'-", min_size=1, max_size=8)


def _tree_strategy():
    leaves = st.builds(lambda l, t: ParseTree(l, (), t), labels, tokens)
    return st.recursive(
        leaves,
        lambda children: st.builds(
            lambda l, cs: ParseTree(l, tuple(cs)),
            labels,
            st.lists(children, min_size=1, max_size=4),
        ),
        max_leaves=12,
    )


@given(_tree_strategy())
def test_roundtrip_serialize_parse(tree):
    assert parse_bracketed(tree.serialize(), unwrap_root=False) == tree


@given(_tree_strategy())
def test_pattern_depends_only_on_top_two_levels(tree):
    pattern = extract_pattern(tree)
    assert pattern.root == tree.label
    assert pattern.child_labels == tuple(c.label for c in tree.children)
    # grafting arbitrary subtrees below level 2 never changes the pattern
    if tree.children:
        graft = ParseTree("ZZZ", (), "zz")
        mutated_children = tuple(
            ParseTree(c.label, (graft,), None) for c in tree.children
        )
        mutated = ParseTree(tree.label, mutated_children)
        assert extract_pattern(mutated).canonical == pattern.canonical
