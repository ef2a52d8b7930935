"""Folded graphs for finitely generated subgroups of free groups.

A subgroup H of a free group, given by finitely many generator words, is
stored as its folded core graph: a finite graph with edges labeled by
generators and a base vertex, such that no vertex carries two equal-label
edges in the same direction and no non-base vertex has degree one.  Vertices
are renumbered by breadth-first search from the base, scanning letters in the
fixed order +1, -1, +2, -2, ..., so equal subgroups yield identical tables
and graph equality is plain tuple equality.

The graph decides membership, index, and rank exactly, produces a free basis
with rewriting of members over that basis, and supports intersections and
containment checks via product graphs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from mcgcert.words import Alphabet, AlphabetMismatch, Word, _free_reduce, _invert


class InfiniteIndexError(ValueError):
    """A finite coset table was requested for an infinite-index subgroup."""


@dataclass(frozen=True)
class GraphInvariants:
    """Vertex and edge counts with the derived rank and index.

    ``index`` is ``None`` when the subgroup has infinite index, i.e. when the
    graph is not a full covering of the rose.
    """

    vertices: int
    edges: int
    rank: int
    index: Optional[int]


def _slot(letter: int) -> int:
    """Slot index of a signed letter: +1,-1,+2,-2,... map to 0,1,2,3,..."""
    return 2 * (letter - 1) if letter > 0 else 2 * (-letter - 1) + 1


def _slot_letter(slot: int) -> int:
    base = slot // 2 + 1
    return base if slot % 2 == 0 else -base


class SubgroupGraph:
    """A folded, pruned, canonically numbered subgroup graph.

    ``table[v][s]`` is the endpoint of the edge read from vertex ``v`` along
    the letter of slot ``s``, or ``None`` when no such edge exists.  Vertex 0
    is the base.  Instances are built by :func:`subgroup_graph`,
    :func:`from_coset_action`, or :meth:`intersect`; the constructor assumes
    its input is already canonical.
    """

    __slots__ = ("alphabet", "table", "_cache")

    def __init__(self, alphabet: Alphabet, table: Sequence[Sequence[Optional[int]]]):
        self.alphabet = alphabet
        self.table = tuple(tuple(row) for row in table)
        self._cache: dict = {}

    # -- basics ---------------------------------------------------------

    @property
    def vertices(self) -> int:
        return len(self.table)

    def transition(self, vertex: int, letter: int) -> Optional[int]:
        """Endpoint of the ``letter``-edge at ``vertex``, or None."""
        return self.table[vertex][_slot(letter)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubgroupGraph):
            return NotImplemented
        return (self.alphabet.rank, self.table) == (other.alphabet.rank, other.table)

    def __hash__(self) -> int:
        return hash((self.alphabet.rank, self.table))

    def __repr__(self) -> str:
        return f"SubgroupGraph(rank-{self.alphabet.rank} ambient, {self.vertices} vertices)"

    # -- membership and invariants ---------------------------------------

    def _check_word(self, word: Word) -> None:
        if word.alphabet.rank != self.alphabet.rank:
            raise AlphabetMismatch(
                f"word over rank {word.alphabet.rank} against graph over rank {self.alphabet.rank}"
            )

    def member(self, word: Word) -> bool:
        """Whether ``word`` lies in the subgroup: trace it from the base."""
        self._check_word(word)
        cur = 0
        for letter in word.letters:
            nxt = self.table[cur][_slot(letter)]
            if nxt is None:
                return False
            cur = nxt
        return cur == 0

    def invariants(self) -> GraphInvariants:
        filled = sum(1 for row in self.table for t in row if t is not None)
        edges = filled // 2
        complete = filled == len(self.table) * 2 * self.alphabet.rank
        return GraphInvariants(
            vertices=len(self.table),
            edges=edges,
            rank=edges - len(self.table) + 1,
            index=len(self.table) if complete else None,
        )

    # -- spanning tree, basis, rewriting ---------------------------------

    def _tree_data(self):
        """Spanning tree reps + basis of the subgroup, computed once.

        Returns ``(reps, basis, edge_sym)`` where ``reps[v]`` is the letter
        tuple of the tree path from the base to ``v``, ``basis`` is the list
        of basis Words (one per non-tree edge, in scan order), and
        ``edge_sym`` maps each directed non-tree edge ``(u, letter)`` to its
        signed basis symbol.
        """
        cached = self._cache.get("tree")
        if cached is not None:
            return cached
        nslots = 2 * self.alphabet.rank
        reps: List[Optional[Tuple[int, ...]]] = [None] * self.vertices
        reps[0] = ()
        tree: set = set()
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for s in range(nslots):
                t = self.table[v][s]
                if t is not None and reps[t] is None and t != 0:
                    letter = _slot_letter(s)
                    reps[t] = reps[v] + (letter,)
                    tree.add((v, letter, t))
                    tree.add((t, -letter, v))
                    queue.append(t)
        basis: List[Word] = []
        edge_sym: Dict[Tuple[int, int], int] = {}
        for v in range(self.vertices):
            for s in range(nslots):
                t = self.table[v][s]
                if t is None:
                    continue
                letter = _slot_letter(s)
                if (v, letter, t) in tree or (v, letter) in edge_sym:
                    continue
                word = self.alphabet.word(reps[v] + (letter,) + _invert(reps[t]))
                basis.append(word)
                sym = len(basis)
                edge_sym[(v, letter)] = sym
                if (t, -letter) not in edge_sym:
                    edge_sym[(t, -letter)] = -sym
        data = (reps, basis, edge_sym)
        self._cache["tree"] = data
        return data

    def basis(self) -> List[Word]:
        """A free basis of the subgroup, in deterministic scan order."""
        return list(self._tree_data()[1])

    def basis_alphabet(self) -> Alphabet:
        """Alphabet for rewritten members; rank max(1, subgroup rank)."""
        return Alphabet(max(1, len(self._tree_data()[1])))

    def express(self, word: Word) -> Optional[Word]:
        """Rewrite a member over :meth:`basis`; None when not a member.

        The returned word is over :meth:`basis_alphabet`; substituting the
        basis words for its letters recovers ``word`` exactly.
        """
        self._check_word(word)
        _, _, edge_sym = self._tree_data()
        cur = 0
        symbols: List[int] = []
        for letter in word.letters:
            nxt = self.table[cur][_slot(letter)]
            if nxt is None:
                return None
            sym = edge_sym.get((cur, letter))
            if sym is not None:
                symbols.append(sym)
            cur = nxt
        if cur != 0:
            return None
        return self.basis_alphabet().word(_free_reduce(symbols))

    # -- coset structure --------------------------------------------------

    def coset_action(self) -> Dict[int, Tuple[int, ...]]:
        """Action of each signed letter on vertices, for finite index only.

        Vertex numbering doubles as coset numbering (base = coset 0); the
        same breadth-first standardization is used by the coset enumerator,
        so finite-index tables from both sides compare equal.
        """
        inv = self.invariants()
        if inv.index is None:
            raise InfiniteIndexError(
                "subgroup has infinite index; no finite coset table exists"
            )
        action: Dict[int, Tuple[int, ...]] = {}
        for letter in range(1, self.alphabet.rank + 1):
            action[letter] = tuple(row[_slot(letter)] for row in self.table)
            action[-letter] = tuple(row[_slot(-letter)] for row in self.table)
        return action

    # -- lattice operations ------------------------------------------------

    def intersect(self, other: "SubgroupGraph") -> "SubgroupGraph":
        """Graph of the intersection: reachable part of the product graph."""
        if self.alphabet.rank != other.alphabet.rank:
            raise AlphabetMismatch("intersection requires equal ambient rank")
        nslots = 2 * self.alphabet.rank
        numbering = {(0, 0): 0}
        adj: List[Dict[int, int]] = [{}]
        queue = deque([(0, 0)])
        while queue:
            u1, u2 = pair = queue.popleft()
            v = numbering[pair]
            for s in range(nslots):
                t1 = self.table[u1][s]
                t2 = other.table[u2][s]
                if t1 is None or t2 is None:
                    continue
                target = (t1, t2)
                w = numbering.get(target)
                if w is None:
                    w = len(adj)
                    numbering[target] = w
                    adj.append({})
                    queue.append(target)
                adj[v][_slot_letter(s)] = w
        return _finish(self.alphabet, adj, 0)

    def contains(self, other: "SubgroupGraph") -> bool:
        """Whether ``other`` is a subgroup of this subgroup."""
        return all(self.member(w) for w in other.basis())


# -- construction ----------------------------------------------------------


def subgroup_graph(alphabet: Alphabet, generators: Iterable[Word]) -> SubgroupGraph:
    """Build the folded core graph of the subgroup the words generate."""
    edges: List[Tuple[int, int, int]] = []
    n = 1  # vertex 0 is the base
    for gen in generators:
        if gen.alphabet.rank != alphabet.rank:
            raise AlphabetMismatch("generator over a different ambient rank")
        letters = gen.letters
        if not letters:
            continue
        prev = 0
        for i, letter in enumerate(letters):
            nxt = 0 if i == len(letters) - 1 else n
            if nxt != 0:
                n += 1
            edges.append((prev, letter, nxt))
            prev = nxt
    adj, base = _fold(n, edges)
    return _finish(alphabet, adj, base)


def from_coset_action(
    alphabet: Alphabet, action: Dict[int, Sequence[int]]
) -> SubgroupGraph:
    """Graph of a point stabilizer of a transitive action on {0..k-1}.

    ``action`` maps positive letters (optionally negative ones too) to target
    lists; each positive letter must act as a permutation, and provided
    negative letters must be the inverse permutations.  The stabilized point
    is 0.
    """
    pos = {l: list(action[l]) for l in action if l > 0}
    if set(pos) != set(range(1, alphabet.rank + 1)):
        raise ValueError("action must cover letters 1..rank")
    sizes = {len(p) for p in pos.values()}
    if len(sizes) != 1:
        raise ValueError("action lists have unequal lengths")
    k = sizes.pop()
    if k == 0:
        raise ValueError("action on an empty set")
    for letter, perm in pos.items():
        if sorted(perm) != list(range(k)):
            raise ValueError(f"letter {letter} does not act as a permutation")
        neg = action.get(-letter)
        if neg is not None:
            expected = [0] * k
            for i, t in enumerate(perm):
                expected[t] = i
            if list(neg) != expected:
                raise ValueError(f"letter {-letter} is not the inverse of {letter}")
    adj: List[Dict[int, int]] = [dict() for _ in range(k)]
    for letter, perm in pos.items():
        for v, t in enumerate(perm):
            adj[v][letter] = t
            adj[t][-letter] = v
    graph = _finish(alphabet, adj, 0)
    if graph.vertices != k:
        raise ValueError("action is not transitive")
    return graph


def _fold(
    n: int, edges: Sequence[Tuple[int, int, int]]
) -> Tuple[List[Dict[int, int]], int]:
    """Union-find folding: clean adjacency plus the base's representative.

    Vertices that were merged away get an empty dict; all targets in
    surviving dicts are representatives.  Vertex 0 is the base, but its class
    may end up represented by another vertex, hence the second return value.
    """
    parent = list(range(n))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    out: List[Dict[int, int]] = [dict() for _ in range(n)]
    pending: deque = deque()

    def set_edge(u: int, letter: int, v: int) -> None:
        ru = find(u)
        cur = out[ru].get(letter)
        if cur is None:
            out[ru][letter] = v
        elif find(cur) != find(v):
            pending.append((cur, v))

    for u, letter, v in edges:
        set_edge(u, letter, v)
        set_edge(v, -letter, u)
    while pending:
        a, b = pending.popleft()
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if len(out[ra]) < len(out[rb]):
            ra, rb = rb, ra
        parent[rb] = ra
        absorbed = out[rb]
        out[rb] = {}
        for letter, t in absorbed.items():
            cur = out[ra].get(letter)
            if cur is None:
                out[ra][letter] = t
            elif find(cur) != find(t):
                pending.append((cur, t))
    clean: List[Dict[int, int]] = [dict() for _ in range(n)]
    for v in range(n):
        if find(v) == v:
            clean[v] = {letter: find(t) for letter, t in out[v].items()}
    return clean, find(0)


def _finish(alphabet: Alphabet, adj: List[Dict[int, int]], base: int) -> SubgroupGraph:
    """Prune degree-one non-base vertices, then renumber by BFS."""
    alive = [bool(d) or v == base for v, d in enumerate(adj)]
    queue = deque(
        v for v, d in enumerate(adj) if alive[v] and v != base and len(d) == 1
    )
    while queue:
        v = queue.popleft()
        if not alive[v] or v == base or len(adj[v]) != 1:
            continue
        letter, w = next(iter(adj[v].items()))
        alive[v] = False
        adj[v] = {}
        del adj[w][-letter]
        if w != base and len(adj[w]) == 1:
            queue.append(w)
    nslots = 2 * alphabet.rank
    numbering = {base: 0}
    order = [base]
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for s in range(nslots):
            t = adj[v].get(_slot_letter(s))
            if t is not None and t not in numbering:
                numbering[t] = len(order)
                order.append(t)
                queue.append(t)
    table = [
        tuple(
            numbering[adj[v][_slot_letter(s)]] if _slot_letter(s) in adj[v] else None
            for s in range(nslots)
        )
        for v in order
    ]
    return SubgroupGraph(alphabet, table)
