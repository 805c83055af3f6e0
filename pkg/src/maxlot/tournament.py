"""Tournaments: complete antisymmetric beats-relations on a finite set.

Alternatives are indexed 0..n-1. The matrix convention throughout the
package is ``beats[i][j]`` true iff alternative i beats alternative j, so
row i lists what i beats. Alternative sets are plain frozensets of indices.
"""

import numpy as np

from . import rng


class TournamentFormatError(ValueError):
    """Malformed tournament text; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, column: int | None = None):
        place = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{place}: {message}")
        self.line = line
        self.column = column


class Tournament:
    """Immutable complete antisymmetric relation on n alternatives.

    Args:
        beats: n x n boolean matrix, ``beats[i][j]`` true iff i beats j.

    Raises:
        ValueError: non-square input, true diagonal entry, or a pair
            (i, j) with zero or two orientations set.
    """

    __slots__ = ("n", "beats")

    def __init__(self, beats):
        matrix = np.asarray(beats, dtype=bool)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"beats matrix must be square, got shape {matrix.shape}")
        n = matrix.shape[0]
        if n < 1:
            raise ValueError("a tournament needs at least one alternative")
        if matrix.diagonal().any():
            i = int(np.flatnonzero(matrix.diagonal())[0])
            raise ValueError(f"beats[{i}][{i}] is true; nothing beats itself")
        bad = matrix == matrix.T
        bad[np.diag_indices(n)] = False
        if bad.any():
            i, j = (int(v) for v in np.argwhere(bad)[0])
            raise ValueError(
                f"alternatives {i} and {j}: exactly one orientation must be set")
        matrix = matrix.copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "beats", matrix)

    def __setattr__(self, name, value):
        raise AttributeError("Tournament is immutable")

    def __eq__(self, other):
        return (isinstance(other, Tournament)
                and self.n == other.n
                and bool(np.array_equal(self.beats, other.beats)))

    def __hash__(self):
        return hash((self.n, self.beats.tobytes()))

    def __repr__(self):
        return f"Tournament(n={self.n})"

    def wins_against(self, x: int) -> frozenset:
        """T+(x): the alternatives that x beats."""
        return frozenset(int(i) for i in np.flatnonzero(self.beats[x]))

    def loses_against(self, x: int) -> frozenset:
        """T-(x): the alternatives that beat x."""
        return frozenset(int(i) for i in np.flatnonzero(self.beats[:, x]))


def from_matrix(rows) -> Tournament:
    """Validated Tournament from a list of boolean rows."""
    return Tournament(rows)


def condorcet_winner(t: Tournament) -> int | None:
    """The unique alternative beating all others, if it exists."""
    degrees = t.beats.sum(axis=1)
    winners = np.flatnonzero(degrees == t.n - 1)
    return int(winners[0]) if winners.size else None


def restrict(t: Tournament, keep) -> tuple[Tournament, list[int]]:
    """Sub-tournament on `keep`, plus the sub-index -> original-index map."""
    indices = sorted(keep)
    if not indices:
        raise ValueError("cannot restrict to an empty set of alternatives")
    if indices[0] < 0 or indices[-1] >= t.n:
        raise ValueError(f"restriction {indices} out of range for n={t.n}")
    sub = t.beats[np.ix_(indices, indices)]
    return Tournament(sub), indices


def top_cycle(t: Tournament, within=None) -> frozenset:
    """The Top-Cycle of the restriction of t to `within` (default: all).

    Computed as the source strongly-connected component of the restricted
    beats-digraph; the condensation of a tournament is a total order, so
    the source component is unique and equals the smallest set whose
    members all beat every outsider.
    """
    if within is None:
        sub, indices = t, list(range(t.n))
    else:
        sub, indices = restrict(t, within)
    components = _strongly_connected_components(sub.beats)
    for comp in components:
        outside = [x for x in range(sub.n) if x not in comp]
        if all(sub.beats[y][x] for y in comp for x in outside):
            return frozenset(indices[i] for i in comp)
    raise AssertionError("a tournament condensation always has a source")


def _strongly_connected_components(beats: np.ndarray) -> list[set]:
    """Tarjan's algorithm, iterative to be safe on larger inputs."""
    n = beats.shape[0]
    successors = [np.flatnonzero(beats[v]) for v in range(n)]
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[set] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, child = work[-1]
            if child == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(child, len(successors[v])):
                w = int(successors[v][k])
                if index[w] == -1:
                    work[-1] = (v, k + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.add(w)
                    if w == v:
                        break
                components.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return components


def random_tournament(n: int, seed: int) -> Tournament:
    """Uniformly random tournament: an independent fair coin per pair.

    Pairs (i, j) with i < j are visited in lexicographic order, one raw
    word each from stream ``rng.TOURNAMENT_STREAM`` of `seed`; the word's
    low bit set means i beats j. Same (n, seed) always gives the same
    tournament.
    """
    if n < 1:
        raise ValueError(f"need at least one alternative, got n={n}")
    stream = rng.RawStream(seed, rng.TOURNAMENT_STREAM)
    beats = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            if stream.next_raw() & 1:
                beats[i][j] = True
            else:
                beats[j][i] = True
    return Tournament(beats)


def cyclone(n: int) -> Tournament:
    """Regular tournament on odd n: i beats i+1, ..., i+(n-1)//2 (mod n)."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"cyclone needs an odd n >= 3, got {n}")
    beats = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for d in range(1, (n - 1) // 2 + 1):
            beats[i][(i + d) % n] = True
    return Tournament(beats)


def dumps(t: Tournament) -> str:
    """Text form: first line n, then n lines of space-separated 0/1."""
    lines = [str(t.n)]
    for row in t.beats:
        lines.append(" ".join("1" if v else "0" for v in row))
    return "\n".join(lines) + "\n"


def loads(text: str) -> Tournament:
    """Parse the text form; malformed input fails with line/column."""
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise TournamentFormatError("expected the alternative count", line=1)
    head = lines[0].strip()
    try:
        n = int(head)
    except ValueError:
        raise TournamentFormatError(
            f"expected the alternative count, got {head!r}", line=1) from None
    if n < 1:
        raise TournamentFormatError(f"alternative count must be >= 1, got {n}", line=1)
    rows = []
    body = [line for line in lines[1:]]
    if len(body) < n:
        raise TournamentFormatError(
            f"expected {n} matrix rows, found {len(body)}", line=len(lines))
    for r in range(n):
        tokens = body[r].split()
        if len(tokens) != n:
            raise TournamentFormatError(
                f"expected {n} entries, found {len(tokens)}", line=r + 2)
        row = []
        for c, token in enumerate(tokens):
            if token not in ("0", "1"):
                raise TournamentFormatError(
                    f"expected '0' or '1', got {token!r}", line=r + 2, column=c + 1)
            row.append(token == "1")
        rows.append(row)
    extra = [line for line in body[n:] if line.strip()]
    if extra:
        raise TournamentFormatError("unexpected content after the matrix",
                                    line=n + 2)
    for i in range(n):
        if rows[i][i]:
            raise TournamentFormatError(
                f"beats[{i}][{i}] must be 0", line=i + 2, column=i + 1)
        for j in range(i + 1, n):
            if rows[i][j] == rows[j][i]:
                raise TournamentFormatError(
                    f"alternatives {i} and {j}: exactly one orientation must be set",
                    line=j + 2, column=i + 1)
    return Tournament(rows)


def load(path) -> Tournament:
    with open(path, "r", encoding="ascii") as handle:
        return loads(handle.read())


def save(t: Tournament, path) -> None:
    with open(path, "w", encoding="ascii") as handle:
        handle.write(dumps(t))
