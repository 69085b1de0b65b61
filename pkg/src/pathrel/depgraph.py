"""Dependency-parsed sentence ingestion, entity heads, and tree path queries.

Sentences arrive as CoNLL-U text (one token per line, ten tab-separated
columns, blank line between sentences).  Only ID, FORM, UPOS, HEAD and
DEPREL are interpreted; the remaining columns are preserved verbatim so
that parse -> serialize -> parse round-trips exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

UP = "UP"
DOWN = "DOWN"


class ConlluError(ValueError):
    """Base class for malformed or structurally invalid input."""


class MalformedLine(ConlluError):
    pass


class MultipleRoots(ConlluError):
    pass


class NoRoot(ConlluError):
    pass


class CycleDetected(ConlluError):
    pass


class HeadOutOfRange(ConlluError):
    pass


@dataclass(frozen=True)
class Token:
    """One token of a dependency-parsed sentence (1-based index)."""

    index: int
    form: str
    pos: str
    head: int
    deprel: str
    # untouched CoNLL-U columns, kept for round-tripping: LEMMA, XPOS, FEATS, DEPS, MISC
    extras: tuple[str, str, str, str, str] = ("_", "_", "_", "_", "_")


@dataclass(frozen=True)
class DependencyTree:
    """A rooted labeled dependency tree over a sentence.

    Exactly one token has head 0 (the root); following head pointers from
    any token reaches the virtual root without cycles.  Construction
    validates these invariants and raises the matching ConlluError.
    """

    tokens: tuple[Token, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        _validate_tree(self.tokens)

    @property
    def n(self) -> int:
        return len(self.tokens)

    @property
    def root(self) -> int:
        for tok in self.tokens:
            if tok.head == 0:
                return tok.index
        raise NoRoot("tree has no root token")  # unreachable after validation

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    def depth(self, index: int) -> int:
        """Number of head steps from the token to the virtual root's child."""
        steps = 0
        cur = index
        while self.tokens[cur - 1].head != 0:
            cur = self.tokens[cur - 1].head
            steps += 1
        return steps

    def path_parents(self) -> tuple[dict[int, int], dict[int, str]]:
        """Parent and edge-label maps used by path queries.

        Returns (parents, labels) where parents[i] is the head of token i
        (0 for the root) and labels[i] is the relation on the i->head edge.
        """
        parents = {tok.index: tok.head for tok in self.tokens}
        labels = {tok.index: tok.deprel for tok in self.tokens}
        return parents, labels


def _validate_tree(tokens: tuple[Token, ...]) -> None:
    n = len(tokens)
    if n == 0:
        raise MalformedLine("empty sentence")
    for pos_i, tok in enumerate(tokens, start=1):
        if tok.index != pos_i:
            raise MalformedLine(
                f"token IDs must be contiguous 1..{n}, found {tok.index} at position {pos_i}"
            )
    roots = [tok.index for tok in tokens if tok.head == 0]
    if len(roots) > 1:
        raise MultipleRoots(f"tokens {roots} all have head 0")
    if not roots:
        raise NoRoot("no token has head 0")
    for tok in tokens:
        if not 0 <= tok.head <= n:
            raise HeadOutOfRange(f"token {tok.index} has head {tok.head}, valid range 0..{n}")
    # every token must reach the root in at most n steps
    for tok in tokens:
        cur = tok.index
        for _ in range(n):
            cur = tokens[cur - 1].head
            if cur == 0:
                break
        else:
            raise CycleDetected(f"head chain from token {tok.index} never reaches the root")


@dataclass(frozen=True)
class EntitySpan:
    """Inclusive token-index span of one entity mention."""

    start: int
    end: int
    id: str = "e1"

    def __post_init__(self):
        if not 1 <= self.start <= self.end:
            raise ValueError(f"bad span [{self.start}, {self.end}]")

    def __contains__(self, index: int) -> bool:
        return self.start <= index <= self.end


@dataclass(frozen=True)
class Instance:
    """One labeled relation-classification example."""

    tree: DependencyTree
    e1: EntitySpan
    e2: EntitySpan
    label: str
    sid: str | None = None

    def __post_init__(self):
        n = self.tree.n
        for span in (self.e1, self.e2):
            if span.end > n:
                raise ValueError(f"span [{span.start}, {span.end}] exceeds sentence length {n}")
        if not (self.e1.end < self.e2.start or self.e2.end < self.e1.start):
            raise ValueError("entity spans overlap")


class PathEdge(NamedTuple):
    deprel: str
    direction: str  # UP (dependent -> head) or DOWN (head -> dependent)


@dataclass(frozen=True)
class SdpPath:
    """A shortest dependency path: alternating tokens and directed relations.

    nodes are token indices; edges[i] annotates the step nodes[i] -> nodes[i+1].
    forms and pos mirror nodes with surface words and coarse POS tags.
    """

    nodes: tuple[int, ...]
    edges: tuple[PathEdge, ...]
    forms: tuple[str, ...] = ()
    pos: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.edges) != len(self.nodes) - 1:
            raise ValueError(
                f"{len(self.nodes)} nodes need {len(self.nodes) - 1} edges, got {len(self.edges)}"
            )
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError(f"repeated node in path {self.nodes}")

    def __len__(self) -> int:
        return len(self.nodes)


# ---------------------------------------------------------------------------
# CoNLL-U reading and writing


def _parse_token_line(line: str, line_no: int) -> Token | None:
    cols = line.split("\t")
    if len(cols) != 10:
        cols = line.split()
    if len(cols) != 10:
        raise MalformedLine(f"line {line_no}: expected 10 columns, got {len(cols)}")
    tok_id, form, lemma, upos, xpos, feats, head, deprel, deps, misc = cols
    if "-" in tok_id or "." in tok_id:
        return None  # multi-word token or empty node: not part of the basic tree
    try:
        index = int(tok_id)
    except ValueError:
        raise MalformedLine(f"line {line_no}: non-integer ID {tok_id!r}") from None
    try:
        head_i = int(head)
    except ValueError:
        raise MalformedLine(f"line {line_no}: non-integer HEAD {head!r}") from None
    return Token(index, form, upos, head_i, deprel, (lemma, xpos, feats, deps, misc))


def parse_conllu(text: str) -> list[DependencyTree]:
    """Parse CoNLL-U text into validated dependency trees.

    Comment lines starting with '#' are ignored; lines whose ID contains
    '-' or '.' are skipped.  Structural violations raise MultipleRoots,
    NoRoot, CycleDetected, HeadOutOfRange or MalformedLine, each naming
    the sentence and line where it was found.
    """
    trees = []
    block: list[Token] = []
    block_start = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            if block:
                trees.append(_finish_block(block, len(trees) + 1, block_start))
                block = []
                block_start = None
            continue
        if line.lstrip().startswith("#"):
            continue
        tok = _parse_token_line(line, line_no)
        if tok is None:
            continue
        if block_start is None:
            block_start = line_no
        block.append(tok)
    if block:
        trees.append(_finish_block(block, len(trees) + 1, block_start))
    return trees


def _finish_block(block: list[Token], ordinal: int, start_line) -> DependencyTree:
    try:
        return DependencyTree(tuple(block))
    except ConlluError as err:
        raise type(err)(f"sentence {ordinal} (starting line {start_line}): {err}") from None


def serialize_conllu(trees: Iterable[DependencyTree]) -> str:
    """Inverse of parse_conllu for the consumed and preserved columns."""
    out = []
    for tree in trees:
        for tok in tree.tokens:
            lemma, xpos, feats, deps, misc = tok.extras
            out.append(
                "\t".join(
                    (
                        str(tok.index),
                        tok.form,
                        lemma,
                        tok.pos,
                        xpos,
                        feats,
                        str(tok.head),
                        tok.deprel,
                        deps,
                        misc,
                    )
                )
            )
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


# ---------------------------------------------------------------------------
# Entity heads and paths


def entity_head(tree: DependencyTree, span: EntitySpan) -> int:
    """Token of the span whose head lies outside the span.

    When the parse attaches several span tokens outside, the one nearest
    the root wins; remaining ties go to the smallest index.  Deterministic
    by construction.
    """
    candidates = [
        tok.index
        for tok in tree.tokens[span.start - 1 : span.end]
        if tok.head == 0 or tok.head not in span
    ]
    return min(candidates, key=lambda i: (tree.depth(i), i))


def path_between(structure, a: int, b: int) -> SdpPath:
    """The unique simple tree path between two tokens.

    Works on any structure exposing path_parents() and tokens, i.e. both
    DependencyTree and RegularizedTree.  Each edge carries its relation
    label and a traversal direction: UP when moving dependent -> head,
    DOWN when moving head -> dependent.  a == b yields a single-node path.
    """
    parents, labels = structure.path_parents()
    tokens = structure.tokens

    def depth_of(i):
        d = 0
        while parents[i] != 0:
            i = parents[i]
            d += 1
        return d

    left = [a]   # a up to the LCA
    right = [b]  # b up to the LCA
    da, db = depth_of(a), depth_of(b)
    x, y = a, b
    while da > db:
        x = parents[x]
        left.append(x)
        da -= 1
    while db > da:
        y = parents[y]
        right.append(y)
        db -= 1
    while x != y:
        x = parents[x]
        y = parents[y]
        left.append(x)
        right.append(y)

    nodes = left + right[:-1][::-1]
    edges = []
    for u in left[:-1]:
        edges.append(PathEdge(labels[u], UP))
    for v in right[:-1][::-1]:
        edges.append(PathEdge(labels[v], DOWN))
    return SdpPath(
        nodes=tuple(nodes),
        edges=tuple(edges),
        forms=tuple(tokens[i - 1].form for i in nodes),
        pos=tuple(tokens[i - 1].pos for i in nodes),
    )
