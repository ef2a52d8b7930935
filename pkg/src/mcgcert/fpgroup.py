"""Finitely presented groups and the exact machinery attached to them.

A group is given as a :class:`Presentation`: an alphabet of generators and a
tuple of relator words.  On top of that this module provides

- integer matrix tools: a fraction-free determinant and a Smith normal form
  with verified unimodular transforms,
- abelianization as a computed invariant: torsion moduli, free rank, and
  projection of words to the abelian quotient,
- Todd-Coxeter coset enumeration with explicit budget and incompleteness
  errors, producing standardized coset tables,
- coset tables derived from finite abelian quotients and from permutation
  representations (regular tables),
- Reidemeister-Schreier subgroup presentations from a coset table,
- deterministic Tietze simplification,
- permutation images with exact closure orders, and
- step-by-step certificates that two words are equal modulo the relators.

Coset tables use the same breadth-first standardization as subgroup graphs
(letters scanned in the order +1, -1, +2, -2, ...), so tables produced by
different routes compare equal whenever they describe the same action.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from mcgcert.words import (
    Alphabet,
    AlphabetMismatch,
    ParseError,
    Word,
    _free_reduce,
    _invert,
)


class EnumerationBudgetError(RuntimeError):
    """Coset enumeration exceeded its budget of defined cosets."""

    def __init__(self, defined: int, budget: int):
        super().__init__(
            f"coset enumeration defined {defined} cosets, exceeding the budget {budget}"
        )
        self.defined = defined
        self.budget = budget


class IncompleteTableError(RuntimeError):
    """Enumeration halted with an incomplete table.

    This happens exactly when some generator is constrained by no relator,
    so its action can never close; for a free ambient group it is a proof of
    infinite index.
    """


class ClosureBoundError(RuntimeError):
    """Closure of a permutation group exceeded the requested bound."""


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class Presentation:
    """Generators and relators; the group is the quotient by their closure."""

    alphabet: Alphabet
    relators: Tuple[Word, ...]

    def __init__(self, alphabet: Alphabet, relators: Iterable[Word]):
        rels = tuple(relators)
        for w in rels:
            if w.alphabet.rank != alphabet.rank:
                raise AlphabetMismatch("relator over a different ambient rank")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "relators", rels)

    @property
    def rank(self) -> int:
        return self.alphabet.rank

    def __repr__(self) -> str:
        rels = ", ".join(str(w) for w in self.relators)
        return f"Presentation({self.alphabet.rank} generators | {rels})"


def parse_presentation(text: str) -> Presentation:
    """Parse the line-based presentation format.

    ``#`` starts a comment, blank lines are skipped, the first content line
    must be ``gens:`` followed by distinct single lowercase names, and each
    following line is ``rel: <word>`` or ``rels: <word>, <word>, ...``.
    """
    alphabet: Optional[Alphabet] = None
    relators: List[Word] = []

    def parse_at(fragment: str, lineno: int, offset: int) -> Word:
        try:
            return alphabet.parse(fragment)
        except ParseError as exc:
            col = (exc.column or 1) + offset
            raise ParseError(exc.reason, line=lineno, column=col) from None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if alphabet is None:
            if not stripped.startswith("gens:"):
                raise ParseError(
                    "first line must declare generators with 'gens:'",
                    line=lineno,
                    column=1,
                )
            names = stripped[len("gens:") :].split()
            if not names:
                raise ParseError("empty generator list", line=lineno, column=1)
            try:
                alphabet = Alphabet(len(names), names=tuple(names))
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno, column=1) from None
            continue
        if stripped.startswith("rel:"):
            offset = line.index("rel:") + len("rel:")
            relators.append(parse_at(line[offset:], lineno, offset))
        elif stripped.startswith("rels:"):
            offset = line.index("rels:") + len("rels:")
            body = line[offset:]
            start = 0
            while True:
                cut = body.find(",", start)
                piece = body[start:cut] if cut >= 0 else body[start:]
                relators.append(parse_at(piece, lineno, offset + start))
                if cut < 0:
                    break
                start = cut + 1
        else:
            raise ParseError(
                "expected 'rel:' or 'rels:'", line=lineno, column=1
            )
    if alphabet is None:
        raise ParseError("no 'gens:' line found", line=0, column=None)
    return Presentation(alphabet, relators)


def format_presentation(p: Presentation) -> str:
    """Render a presentation in the same format :func:`parse_presentation` reads."""
    names = p.alphabet.display_names
    if names is None:
        raise ValueError("presentations over rank > 26 cannot be formatted")
    lines = ["gens: " + " ".join(names)]
    lines.extend(f"rel: {w}" for w in p.relators)
    return "\n".join(lines) + "\n"


def pairwise_commutators(alphabet: Alphabet) -> List[Word]:
    """[g_i, g_j] for i < j; adding them as relators abelianizes a group."""
    gens = alphabet.generators()
    out = []
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            out.append(gens[i] * gens[j] * ~gens[i] * ~gens[j])
    return out


# ---------------------------------------------------------------------------
# integer matrices


def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free Gaussian elimination."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = [list(row) for row in matrix]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if pivot is None:
                return 0
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def smith_normal_form(
    matrix: Sequence[Sequence[int]],
) -> Tuple[List[List[int]], List[List[int]], List[List[int]]]:
    """Diagonalize over the integers: returns (D, U, V) with D = U @ matrix @ V.

    U and V are unimodular; the diagonal of D is nonnegative with each entry
    dividing the next, zeros last.
    """
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    if any(len(r) != cols for r in matrix):
        raise ValueError("ragged matrix")
    a = [list(r) for r in matrix]
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(i, j, q):
        # row_i += q * row_j
        ai, aj = a[i], a[j]
        for t in range(cols):
            ai[t] += q * aj[t]
        ui, uj = u[i], u[j]
        for t in range(rows):
            ui[t] += q * uj[t]

    def add_col(i, j, q):
        # col_i += q * col_j
        for r in a:
            r[i] += q * r[j]
        for r in v:
            r[i] += q * r[j]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        # find a pivot of minimal absolute value in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = a[i][j]
                if x != 0 and (best is None or abs(x) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        if best[0] != t:
            swap_rows(t, best[0])
        if best[1] != t:
            swap_cols(t, best[1])
        if a[t][t] < 0:
            negate_row(t)
        dirty = False
        for i in range(t + 1, rows):
            if a[i][t] != 0:
                add_row(i, t, -(a[i][t] // a[t][t]))
                dirty = dirty or a[i][t] != 0
        for j in range(t + 1, cols):
            if a[t][j] != 0:
                add_col(j, t, -(a[t][j] // a[t][t]))
                dirty = dirty or a[t][j] != 0
        if dirty:
            continue  # smaller pivot appeared; repeat at the same position
        d = a[t][t]
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % d != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(t, offender, 1)
            continue
        t += 1
    return a, u, v


# ---------------------------------------------------------------------------
# abelianization


@dataclass(frozen=True)
class AbelianElement:
    """An element of a finitely generated abelian group Z^f + sum Z/d_i."""

    free: Tuple[int, ...]
    torsion: Tuple[int, ...]
    moduli: Tuple[int, ...]

    def _compatible(self, other: "AbelianElement") -> None:
        if self.moduli != other.moduli or len(self.free) != len(other.free):
            raise ValueError("elements of different abelian groups")

    def __add__(self, other: "AbelianElement") -> "AbelianElement":
        self._compatible(other)
        return AbelianElement(
            tuple(x + y for x, y in zip(self.free, other.free)),
            tuple((x + y) % d for x, y, d in zip(self.torsion, other.torsion, self.moduli)),
            self.moduli,
        )

    def __neg__(self) -> "AbelianElement":
        return AbelianElement(
            tuple(-x for x in self.free),
            tuple((-x) % d for x, d in zip(self.torsion, self.moduli)),
            self.moduli,
        )

    def __sub__(self, other: "AbelianElement") -> "AbelianElement":
        return self + (-other)

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for x in self.free) and all(x == 0 for x in self.torsion)

    def order(self) -> Optional[int]:
        """Order of the element; None when infinite."""
        if any(x != 0 for x in self.free):
            return None
        result = 1
        for x, d in zip(self.torsion, self.moduli):
            k = d // gcd(d, x)
            result = result * k // gcd(result, k)
        return result


@dataclass(frozen=True)
class AbelianStructure:
    """The abelianization of a presented group, with its projection map."""

    alphabet: Alphabet
    moduli: Tuple[int, ...]
    free_rank: int
    _transform: Tuple[Tuple[int, ...], ...]
    _torsion_rows: Tuple[int, ...]
    _free_rows: Tuple[int, ...]

    def project(self, word: Word) -> AbelianElement:
        """Image of a word in the abelian quotient."""
        if word.alphabet.rank != self.alphabet.rank:
            raise AlphabetMismatch("word over a different ambient rank")
        e = word.exponent_vector()
        y = [sum(row[j] * e[j] for j in range(len(e))) for row in self._transform]
        return AbelianElement(
            tuple(y[i] for i in self._free_rows),
            tuple(y[i] % d for i, d in zip(self._torsion_rows, self.moduli)),
            self.moduli,
        )

    def zero(self) -> AbelianElement:
        return AbelianElement((0,) * self.free_rank, (0,) * len(self.moduli), self.moduli)

    def group_order(self) -> Optional[int]:
        """Order of the abelianization; None when it has free part."""
        if self.free_rank:
            return None
        n = 1
        for d in self.moduli:
            n *= d
        return n

    def describe(self) -> str:
        """Human-readable isomorphism type, e.g. ``Z^2 x Z/6``."""
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.moduli)
        return " x ".join(parts) if parts else "trivial"


def abelianization(p: Presentation) -> AbelianStructure:
    """Compute the abelianization from the Smith form of the relator matrix."""
    r = p.alphabet.rank
    n = len(p.relators)
    # columns are relator exponent vectors
    m = [[0] * n for _ in range(r)]
    for j, w in enumerate(p.relators):
        for i, e in enumerate(w.exponent_vector()):
            m[i][j] = e
    d, u, _v = smith_normal_form(m)
    moduli: List[int] = []
    torsion_rows: List[int] = []
    free_rows: List[int] = []
    for i in range(r):
        di = d[i][i] if i < n else 0
        if di == 0:
            free_rows.append(i)
        elif di >= 2:
            torsion_rows.append(i)
            moduli.append(di)
    return AbelianStructure(
        alphabet=p.alphabet,
        moduli=tuple(moduli),
        free_rank=len(free_rows),
        _transform=tuple(tuple(row) for row in u),
        _torsion_rows=tuple(torsion_rows),
        _free_rows=tuple(free_rows),
    )


def ab_class(structure: AbelianStructure, word: Word) -> AbelianElement:
    """Convenience alias for :meth:`AbelianStructure.project`."""
    return structure.project(word)


# ---------------------------------------------------------------------------
# coset tables


def _slot(letter: int) -> int:
    return 2 * (letter - 1) if letter > 0 else 2 * (-letter - 1) + 1


def _slot_letter(slot: int) -> int:
    base = slot // 2 + 1
    return base if slot % 2 == 0 else -base


def _standardize_rows(
    rows: Sequence[Sequence[int]], nslots: int, start: int = 0
) -> List[Tuple[int, ...]]:
    """Renumber a complete transitive table by BFS in slot order."""
    numbering = {start: 0}
    order = [start]
    queue = deque([start])
    while queue:
        c = queue.popleft()
        for s in range(nslots):
            t = rows[c][s]
            if t not in numbering:
                numbering[t] = len(order)
                order.append(t)
                queue.append(t)
    if len(order) != len(rows):
        raise ValueError("coset table is not transitive")
    return [tuple(numbering[rows[c][s]] for s in range(nslots)) for c in order]


@dataclass(frozen=True)
class CosetTable:
    """A complete table for a transitive action on cosets 0..k-1.

    ``rows[c][slot]`` is the coset reached from ``c`` along the slot's
    letter.  Tables coming out of this module are standardized: numbering is
    breadth-first from coset 0 in slot order.
    """

    alphabet: Alphabet
    rows: Tuple[Tuple[int, ...], ...]

    def __init__(self, alphabet: Alphabet, rows):
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "rows", tuple(tuple(r) for r in rows))

    @property
    def index(self) -> int:
        return len(self.rows)

    def action(self, letter: int) -> Tuple[int, ...]:
        return tuple(row[_slot(letter)] for row in self.rows)

    def action_dict(self) -> Dict[int, Tuple[int, ...]]:
        out = {}
        for letter in range(1, self.alphabet.rank + 1):
            out[letter] = self.action(letter)
            out[-letter] = self.action(-letter)
        return out

    def trace(self, coset: int, word: Word) -> int:
        if word.alphabet.rank != self.alphabet.rank:
            raise AlphabetMismatch("word over a different ambient rank")
        c = coset
        for letter in word.letters:
            c = self.rows[c][_slot(letter)]
        return c

    def standardize(self) -> "CosetTable":
        return CosetTable(
            self.alphabet,
            _standardize_rows(self.rows, 2 * self.alphabet.rank),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, CosetTable):
            return NotImplemented
        return (self.alphabet.rank, self.rows) == (other.alphabet.rank, other.rows)

    def __hash__(self) -> int:
        return hash((self.alphabet.rank, self.rows))

    def to_json_dict(self) -> dict:
        """One-based JSON form: {"cosets": k, "action": {"a": [...], "A": [...]}}."""
        names = self.alphabet.display_names
        if names is None:
            raise ValueError("tables over rank > 26 cannot be serialized")
        action = {}
        for i, name in enumerate(names, start=1):
            action[name] = [t + 1 for t in self.action(i)]
            action[name.upper()] = [t + 1 for t in self.action(-i)]
        return {"cosets": self.index, "action": action}

    @staticmethod
    def from_json_dict(data: dict) -> "CosetTable":
        if not isinstance(data, dict):
            raise ValueError("coset table JSON must be an object")
        k = data.get("cosets")
        action = data.get("action")
        if not isinstance(k, int) or k < 1:
            raise ValueError("'cosets' must be a positive integer")
        if not isinstance(action, dict) or not action:
            raise ValueError("'action' must be a non-empty object")
        names = sorted(name for name in action if name.islower())
        if not names or any(len(n) != 1 or not n.isalpha() for n in names):
            raise ValueError("action keys must be single letters")
        alphabet = Alphabet(len(names), names=tuple(names))
        rows = [[None] * (2 * len(names)) for _ in range(k)]
        for i, name in enumerate(names, start=1):
            targets = action[name]
            if len(targets) != k or sorted(targets) != list(range(1, k + 1)):
                raise ValueError(f"'{name}' must be a permutation of 1..{k}")
            inverse = [0] * k
            for c, t in enumerate(targets):
                rows[c][_slot(i)] = t - 1
                rows[t - 1][_slot(-i)] = c
                inverse[t - 1] = c + 1
            upper = name.upper()
            if upper in action and list(action[upper]) != inverse:
                raise ValueError(f"'{upper}' is not the inverse of '{name}'")
        extra = [x for x in action if not x.islower() and x.lower() not in names]
        if extra:
            raise ValueError(f"unknown action keys: {extra}")
        return CosetTable(alphabet, [tuple(r) for r in rows])


def coset_table_from_ab(structure: AbelianStructure) -> CosetTable:
    """Coset table of the kernel of the map onto a finite abelianization.

    Cosets are the elements of the abelian quotient; each generator acts by
    translation.  Requires free rank 0.  Numbering is the same breadth-first
    standardization used everywhere else.
    """
    if structure.free_rank != 0:
        raise ValueError("abelianization has free part; kernel has infinite index")
    gens = structure.alphabet.generators()
    images = [structure.project(g) for g in gens]
    zero = structure.zero()
    nslots = 2 * structure.alphabet.rank
    numbering = {zero: 0}
    order = [zero]
    rows: List[List[int]] = [[None] * nslots]
    queue = deque([zero])
    while queue:
        x = queue.popleft()
        c = numbering[x]
        for s in range(nslots):
            letter = _slot_letter(s)
            y = x + images[letter - 1] if letter > 0 else x - images[-letter - 1]
            t = numbering.get(y)
            if t is None:
                t = len(order)
                numbering[y] = t
                order.append(y)
                rows.append([None] * nslots)
                queue.append(y)
            rows[c][s] = t
    expected = structure.group_order()
    assert len(order) == expected, "translation action missed elements"
    return CosetTable(structure.alphabet, [tuple(r) for r in rows])


# ---------------------------------------------------------------------------
# Todd-Coxeter enumeration


def todd_coxeter(
    p: Presentation,
    subgroup_gens: Sequence[Word] = (),
    budget: int = 10**6,
) -> CosetTable:
    """Enumerate cosets of the subgroup the given words generate.

    Relator scans fill gaps eagerly; coincidences are processed immediately
    through a union-find with a pending queue.  ``budget`` bounds the total
    number of cosets ever defined (merged-away cosets still count).  A
    generator appearing in no relator and no subgroup generator can never
    close, so that raises :class:`IncompleteTableError` up front; the same
    error reports enumeration that halts with holes on letters no relator
    constrains.  The returned table is standardized and verified: every
    relator fixes every coset and every subgroup generator fixes coset 0.
    """
    alphabet = p.alphabet
    r = alphabet.rank
    nslots = 2 * r
    relators = [w.letters for w in p.relators if w.letters]
    subgens = []
    for g in subgroup_gens:
        if g.alphabet.rank != r:
            raise AlphabetMismatch("subgroup generator over a different ambient rank")
        if g.letters:
            subgens.append(g.letters)
    constrained = {abs(l) for rel in relators for l in rel}
    touched = constrained | {abs(l) for g in subgens for l in g}
    for i in range(1, r + 1):
        if i not in touched:
            name = (alphabet.display_names or [str(i)] * r)[i - 1]
            raise IncompleteTableError(
                f"generator '{name}' appears in no relator or subgroup generator; "
                "the table cannot close (infinite index)"
            )

    rows: List[Optional[List[Optional[int]]]] = [[None] * nslots]
    parent = [0]
    defined = 1
    pending: deque = deque()
    queue: deque = deque([0])
    in_queue = {0}

    def find(c: int) -> int:
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def enqueue(c: int) -> None:
        if c not in in_queue:
            in_queue.add(c)
            queue.append(c)

    def define(c: int, letter: int) -> int:
        nonlocal defined
        if defined >= budget:
            raise EnumerationBudgetError(defined + 1, budget)
        new = len(rows)
        rows.append([None] * nslots)
        parent.append(new)
        defined += 1
        rc = find(c)
        rows[rc][_slot(letter)] = new
        rows[new][_slot(-letter)] = rc
        enqueue(new)
        return new

    def set_edge(c: int, letter: int, d: int) -> None:
        rc, rd = find(c), find(d)
        cur = rows[rc][_slot(letter)]
        if cur is None:
            rows[rc][_slot(letter)] = rd
        elif find(cur) != rd:
            pending.append((cur, rd))
        cur = rows[rd][_slot(-letter)]
        if cur is None:
            rows[rd][_slot(-letter)] = rc
        elif find(cur) != rc:
            pending.append((cur, rc))

    def merge_all() -> None:
        while pending:
            x, y = pending.popleft()
            rx, ry = find(x), find(y)
            if rx == ry:
                continue
            if rx > ry:
                rx, ry = ry, rx
            parent[ry] = rx
            absorbed = rows[ry]
            rows[ry] = None
            target = rows[rx]
            for s in range(nslots):
                t = absorbed[s]
                if t is None:
                    continue
                cur = target[s]
                if cur is None:
                    target[s] = t
                elif find(cur) != find(t):
                    pending.append((cur, t))
            # the survivor gained edges, so its relator scans must be redone
            enqueue(rx)

    def scan_fill(start: int, letters: Tuple[int, ...]) -> None:
        c = find(start)
        first = c
        for letter in letters[:-1]:
            nxt = rows[c][_slot(letter)]
            if nxt is None:
                nxt = define(c, letter)
            c = find(nxt)
        set_edge(c, letters[-1], first)
        merge_all()

    for g in subgens:
        scan_fill(0, g)

    while True:
        while queue:
            c = queue.popleft()
            in_queue.discard(c)
            if find(c) != c:
                continue
            for rel in relators:
                scan_fill(c, rel)
                if find(c) != c:
                    break  # merged away; the surviving coset was re-enqueued
        # table closed under relators; fill the first hole if one remains
        hole = None
        blocked = None
        for c in range(len(rows)):
            if find(c) != c:
                continue
            row = rows[c]
            for s in range(nslots):
                if row[s] is None:
                    if abs(_slot_letter(s)) in constrained:
                        hole = (c, s)
                        break
                    blocked = (c, s)
            if hole:
                break
        if hole is None:
            if blocked is not None:
                c, s = blocked
                name_i = abs(_slot_letter(s))
                name = (alphabet.display_names or [str(name_i)] * r)[name_i - 1]
                raise IncompleteTableError(
                    f"enumeration halted with the action of '{name}' undefined "
                    "on some coset (infinite index)"
                )
            break
        c, s = hole
        define(c, _slot_letter(s))
        enqueue(c)

    live = [c for c in range(len(rows)) if find(c) == c]
    resolved = {c: i for i, c in enumerate(live)}
    flat = [
        [resolved[find(rows[c][s])] for s in range(nslots)] for c in live
    ]
    std = _standardize_rows(flat, nslots, start=resolved[find(0)])
    table = CosetTable(alphabet, std)
    for w in p.relators:
        for c in range(table.index):
            assert table.trace(c, w) == c, "relator does not fix a coset"
    for g in subgroup_gens:
        if g.letters:
            assert table.trace(0, g) == 0, "subgroup generator moves coset 0"
    for c in range(table.index):
        for s in range(nslots):
            d = table.rows[c][s]
            letter = _slot_letter(s)
            assert table.rows[d][_slot(-letter)] == c, "inverse inconsistency"
    return table


# ---------------------------------------------------------------------------
# permutation images


def _perm_compose(p: Tuple[int, ...], q: Tuple[int, ...]) -> Tuple[int, ...]:
    """Apply p, then q."""
    return tuple(q[x] for x in p)


def _perm_inverse(p: Tuple[int, ...]) -> Tuple[int, ...]:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def _signed_images(
    alphabet: Alphabet, images: Dict[int, Sequence[int]]
) -> Tuple[int, Dict[int, Tuple[int, ...]]]:
    """Validate an assignment of permutations to positive letters."""
    if set(images) != set(range(1, alphabet.rank + 1)):
        raise ValueError("assignment must cover letters 1..rank exactly")
    degrees = {len(p) for p in images.values()}
    if len(degrees) != 1:
        raise ValueError("permutations of unequal degree")
    degree = degrees.pop()
    if degree == 0:
        raise ValueError("permutations must have positive degree")
    signed: Dict[int, Tuple[int, ...]] = {}
    for letter, perm in images.items():
        tup = tuple(perm)
        if sorted(tup) != list(range(degree)):
            raise ValueError(f"image of letter {letter} is not a permutation")
        signed[letter] = tup
        signed[-letter] = _perm_inverse(tup)
    return degree, signed


def _word_perm(letters: Tuple[int, ...], signed, degree: int) -> Tuple[int, ...]:
    cur = tuple(range(degree))
    for letter in letters:
        cur = _perm_compose(cur, signed[letter])
    return cur


@dataclass(frozen=True)
class PermImage:
    """Result of evaluating a presentation in a permutation group."""

    degree: int
    order: int
    relator_violations: Tuple[int, ...]

    @property
    def is_homomorphism(self) -> bool:
        return not self.relator_violations


def perm_image(
    p: Presentation,
    images: Dict[int, Sequence[int]],
    max_order: int = 10**4,
) -> PermImage:
    """Check relators map to the identity and compute the image's order.

    The order is the size of the subgroup the images generate, found by
    closure; exceeding ``max_order`` raises :class:`ClosureBoundError`.
    """
    degree, signed = _signed_images(p.alphabet, images)
    identity = tuple(range(degree))
    violations = tuple(
        i
        for i, w in enumerate(p.relators)
        if _word_perm(w.letters, signed, degree) != identity
    )
    generators = [signed[i] for i in range(1, p.alphabet.rank + 1)]
    generators += [signed[-i] for i in range(1, p.alphabet.rank + 1)]
    seen = {identity}
    frontier = deque([identity])
    while frontier:
        g = frontier.popleft()
        for h in generators:
            x = _perm_compose(g, h)
            if x not in seen:
                if len(seen) >= max_order:
                    raise ClosureBoundError(
                        f"image order exceeds the bound {max_order}"
                    )
                seen.add(x)
                frontier.append(x)
    return PermImage(degree=degree, order=len(seen), relator_violations=violations)


def regular_coset_table(
    p: Presentation,
    images: Dict[int, Sequence[int]],
    max_order: int = 10**4,
) -> CosetTable:
    """Coset table of the kernel of a permutation representation.

    Cosets are the elements of the image group; generators act by right
    multiplication.  The assignment must send every relator to the identity.
    The table is standardized, so it equals the Todd-Coxeter table of any
    generating set of the same kernel.
    """
    degree, signed = _signed_images(p.alphabet, images)
    identity = tuple(range(degree))
    bad = [
        i
        for i, w in enumerate(p.relators)
        if _word_perm(w.letters, signed, degree) != identity
    ]
    if bad:
        raise ValueError(f"assignment violates relators at indices {bad}")
    nslots = 2 * p.alphabet.rank
    numbering = {identity: 0}
    order = [identity]
    rows: List[List[int]] = [[None] * nslots]
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        c = numbering[g]
        for s in range(nslots):
            x = _perm_compose(g, signed[_slot_letter(s)])
            t = numbering.get(x)
            if t is None:
                if len(order) >= max_order:
                    raise ClosureBoundError(
                        f"image order exceeds the bound {max_order}"
                    )
                t = len(order)
                numbering[x] = t
                order.append(x)
                rows.append([None] * nslots)
                queue.append(x)
            rows[c][s] = t
    return CosetTable(p.alphabet, [tuple(r) for r in rows])


# ---------------------------------------------------------------------------
# Reidemeister-Schreier


@dataclass(frozen=True)
class SchreierData:
    """A subgroup presentation plus its generators as ambient words.

    ``presentation`` is over a fresh alphabet with one letter per Schreier
    generator; ``generator_words[i]`` is the ambient word of letter i+1.
    """

    presentation: Presentation
    generator_words: Tuple[Word, ...]


def reidemeister_schreier(p: Presentation, table: CosetTable) -> SchreierData:
    """Present the subgroup whose coset table is given.

    Schreier generators come from non-tree edges of the breadth-first
    spanning tree of the table, one per (coset, positive letter) pair; the
    relators are every ambient relator rewritten at every coset.
    """
    if table.alphabet.rank != p.alphabet.rank:
        raise AlphabetMismatch("table over a different ambient rank")
    k = table.index
    nslots = 2 * p.alphabet.rank
    reps: List[Optional[Tuple[int, ...]]] = [None] * k
    reps[0] = ()
    tree: set = set()
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for s in range(nslots):
            t = table.rows[c][s]
            if reps[t] is None and t != 0:
                letter = _slot_letter(s)
                reps[t] = reps[c] + (letter,)
                tree.add((c, letter))
                tree.add((t, -letter))
                queue.append(t)
    if any(rep is None for rep in reps):
        raise ValueError("coset table is not transitive")

    symbol: Dict[Tuple[int, int], int] = {}
    gen_words: List[Word] = []
    for c in range(k):
        for x in range(1, p.alphabet.rank + 1):
            if (c, x) in tree:
                continue
            d = table.rows[c][_slot(x)]
            gen_words.append(p.alphabet.word(reps[c] + (x,) + _invert(reps[d])))
            symbol[(c, x)] = len(gen_words)

    sub_alphabet = Alphabet(len(gen_words)) if gen_words else Alphabet(1)

    def rewrite(letters: Tuple[int, ...], start: int) -> Word:
        out: List[int] = []
        c = start
        for letter in letters:
            if letter > 0:
                sym = symbol.get((c, letter))
                if sym is not None:
                    out.append(sym)
                c = table.rows[c][_slot(letter)]
            else:
                d = table.rows[c][_slot(letter)]
                sym = symbol.get((d, -letter))
                if sym is not None:
                    out.append(-sym)
                c = d
        return sub_alphabet.word(_free_reduce(out))

    relators = [rewrite(w.letters, c) for w in p.relators for c in range(k)]
    return SchreierData(
        presentation=Presentation(sub_alphabet, relators),
        generator_words=tuple(gen_words),
    )


# ---------------------------------------------------------------------------
# Tietze simplification


def _cyclic_core(letters: Tuple[int, ...]) -> Tuple[int, ...]:
    i, j = 0, len(letters)
    while i + 1 < j and letters[i] == -letters[j - 1]:
        i += 1
        j -= 1
    return letters[i:j]


def _canonical_relator_key(letters: Tuple[int, ...]) -> Tuple[int, ...]:
    """Minimal rotation over the relator and its inverse."""
    best = None
    for base in (letters, _invert(letters)):
        n = len(base)
        for i in range(n):
            rot = base[i:] + base[:i]
            if best is None or rot < best:
                best = rot
    return best if best is not None else ()


def tietze_simplify(p: Presentation, budget: int = 10**4) -> Presentation:
    """Deterministically shrink a presentation by Tietze transformations.

    Moves: drop trivial/duplicate relators (up to rotation and inversion),
    eliminate a generator that occurs exactly once in some relator
    (choosing the candidate that minimizes total growth), and shorten a
    relator using more than half of another.  ``budget`` bounds the number
    of applied eliminations and shortenings.  A presentation that comes back
    with relators is unsimplified evidence, never a refutation of anything.
    """
    rank = p.alphabet.rank
    names = list(p.alphabet.display_names or ())
    rels: List[Tuple[int, ...]] = [w.letters for w in p.relators]
    moves = 0

    def normalize() -> None:
        nonlocal rels
        seen = {}
        for letters in rels:
            core = _cyclic_core(_free_reduce(letters))
            if not core:
                continue
            key = _canonical_relator_key(core)
            if key not in seen:
                seen[key] = core
        rels = sorted(seen.values(), key=lambda t: (len(t), t))

    def substitute(letters, g, expression):
        out: List[int] = []
        for l in letters:
            if l == g:
                out.extend(expression)
            elif l == -g:
                out.extend(_invert(expression))
            else:
                out.append(l)
        return _free_reduce(out)

    def drop_generator(g: int) -> None:
        nonlocal rels, rank, names
        remap = lambda l: l - 1 if l > g else (l + 1 if l < -g else l)
        rels = [tuple(remap(l) for l in letters) for letters in rels]
        if names:
            del names[g - 1]
        rank -= 1

    def try_eliminate() -> bool:
        nonlocal rels, moves
        best = None
        for ri, letters in enumerate(rels):
            counts: Dict[int, int] = {}
            for l in letters:
                counts[abs(l)] = counts.get(abs(l), 0) + 1
            for g, cnt in counts.items():
                if cnt != 1:
                    continue
                expr_len = len(letters) - 1
                growth = -len(letters)
                for rj, other in enumerate(rels):
                    if rj == ri:
                        continue
                    occurrences = sum(1 for l in other if abs(l) == g)
                    growth += occurrences * (expr_len - 1)
                cand = (growth, g, ri)
                if best is None or cand < best:
                    best = cand
        if best is None:
            return False
        _, g, ri = best
        letters = rels[ri]
        pos = next(i for i, l in enumerate(letters) if abs(l) == g)
        u, v = letters[:pos], letters[pos + 1 :]
        if letters[pos] > 0:
            expression = _free_reduce(_invert(u) + _invert(v))
        else:
            expression = _free_reduce(v + u)
        rels = [
            substitute(other, g, expression)
            for rj, other in enumerate(rels)
            if rj != ri
        ]
        drop_generator(g)
        moves += 1
        return True

    def try_shorten() -> bool:
        nonlocal rels, moves
        for i, u in enumerate(rels):
            for j, s in enumerate(rels):
                if i == j or len(s) > len(u) or len(s) < 2:
                    continue
                variants = []
                seen_vars = set()
                for base in (s, _invert(s)):
                    for t in range(len(base)):
                        rot = base[t:] + base[:t]
                        if rot not in seen_vars:
                            seen_vars.add(rot)
                            variants.append(rot)
                doubled = u + u
                for var in variants:
                    L = len(var)
                    for wlen in range(L, L // 2, -1):
                        if wlen > len(u):
                            continue
                        w = var[:wlen]
                        replacement = _invert(var[wlen:])
                        for pos in range(len(u)):
                            if doubled[pos : pos + wlen] == w:
                                rotated = doubled[pos : pos + len(u)]
                                new = _free_reduce(
                                    replacement + rotated[wlen:]
                                )
                                if len(new) < len(u):
                                    rels[i] = new
                                    moves += 1
                                    return True
        return False

    normalize()
    while moves < budget:
        if try_shorten():
            normalize()
            continue
        if try_eliminate():
            normalize()
            continue
        break
    alphabet = Alphabet(max(rank, 1), names=tuple(names) if names and rank else None)
    if rank == 0:
        # everything was eliminated: the trivial group presented on one
        # generator declared trivial
        return Presentation(alphabet, (alphabet.generator(1),))
    return Presentation(alphabet, tuple(alphabet.word(l) for l in rels))


# ---------------------------------------------------------------------------
# rewriting certificates


@dataclass(frozen=True)
class RewriteStep:
    """Insert conjugator * relator^exponent * conjugator^-1 at a position."""

    position: int
    relator_index: int
    exponent: int
    conjugator: Word


@dataclass(frozen=True)
class RewriteCertificate:
    """A checked derivation that start and target are equal in the group."""

    start: Word
    target: Word
    steps: Tuple[RewriteStep, ...]
    intermediates: Tuple[Word, ...]
    verified: bool


def rewrite_equal(
    p: Presentation, start: Word, target: Word, steps: Sequence[RewriteStep]
) -> RewriteCertificate:
    """Apply relator-insertion steps to ``start`` and compare with ``target``.

    Each step splices a conjugate of a relator power into the current word at
    the given letter position (0..len).  Malformed steps raise ValueError;
    the certificate's ``verified`` flag records whether the final word equals
    ``target``.  Soundness is immediate: every insertion multiplies by an
    element of the normal closure of the relators.
    """
    rank = p.alphabet.rank
    for w in (start, target):
        if w.alphabet.rank != rank:
            raise AlphabetMismatch("word over a different ambient rank")
    current = start
    trail: List[Word] = []
    for n, step in enumerate(steps):
        if not 0 <= step.relator_index < len(p.relators):
            raise ValueError(f"step {n}: relator index {step.relator_index} out of range")
        if step.exponent == 0:
            raise ValueError(f"step {n}: exponent must be nonzero")
        if not 0 <= step.position <= len(current):
            raise ValueError(
                f"step {n}: position {step.position} outside word of length {len(current)}"
            )
        if step.conjugator.alphabet.rank != rank:
            raise AlphabetMismatch(f"step {n}: conjugator over a different rank")
        relator = p.relators[step.relator_index]
        insert = step.conjugator * relator**step.exponent * ~step.conjugator
        letters = current.letters
        current = p.alphabet.word(
            letters[: step.position] + insert.letters + letters[step.position :]
        )
        trail.append(current)
    return RewriteCertificate(
        start=start,
        target=target,
        steps=tuple(steps),
        intermediates=tuple(trail),
        verified=current == target,
    )
