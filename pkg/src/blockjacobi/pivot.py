"""Cyclic pivot orderings: serial generators, equivalence transforms and the
commutation-class equivalence test.

An ordering is a sequence of pairs (r, s), 1 <= r < s <= m, that covers every
pair exactly once.  Transform provenance is tracked in `chain_log`, and
`shift_count_d` counts the shift equivalences used while generating the
ordering (0 for plain serial orderings with permutations).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import numpy as np

__all__ = [
    "OrderingError",
    "PivotOrdering",
    "OrderingMatrix",
    "ordering_from_pairs",
    "is_valid_cyclic",
    "column_cyclic",
    "row_cyclic",
    "serial_with_permutations",
    "reverse",
    "shift",
    "apply_permutation",
    "admissible_transpose",
    "are_equivalent",
    "random_generalized_serial",
    "ordering_matrix",
    "ordering_from_matrix",
    "write_ordering_text",
    "read_ordering_text",
]


class OrderingError(ValueError):
    pass


def _all_pairs(m: int) -> set[tuple[int, int]]:
    return {(r, s) for r in range(1, m + 1) for s in range(r + 1, m + 1)}


def is_valid_cyclic(pairs, m: int) -> bool:
    """True iff the sequence covers every pair of {1..m} exactly once."""
    seq = [tuple(p) for p in pairs]
    if len(seq) != m * (m - 1) // 2:
        return False
    return set(seq) == _all_pairs(m) and len(set(seq)) == len(seq)


@dataclass(frozen=True)
class PivotOrdering:
    pairs: tuple[tuple[int, int], ...]
    m: int
    shift_count_d: int = 0
    chain_log: tuple[str, ...] = ()

    def __post_init__(self):
        if not is_valid_cyclic(self.pairs, self.m):
            raise OrderingError(f"sequence is not a cyclic ordering for m={self.m}")
        if not self.chain_log and self.shift_count_d != 0:
            raise OrderingError("shift_count_d must be 0 when chain_log is empty")

    def __len__(self) -> int:
        return len(self.pairs)


def ordering_from_pairs(pairs, m: int) -> PivotOrdering:
    """Wrap an explicit pair sequence, validating it covers all pairs once."""
    return PivotOrdering(tuple((int(r), int(s)) for r, s in pairs), m)


def column_cyclic(m: int) -> PivotOrdering:
    """(1,2),(1,3),(2,3),(1,4),...: pairs column by column."""
    if m < 2:
        raise OrderingError(f"need m >= 2, got {m}")
    pairs = [(r, s) for s in range(2, m + 1) for r in range(1, s)]
    return PivotOrdering(tuple(pairs), m)


def row_cyclic(m: int) -> PivotOrdering:
    """(1,2),(1,3),...,(1,m),(2,3),...: pairs row by row."""
    if m < 2:
        raise OrderingError(f"need m >= 2, got {m}")
    pairs = [(r, s) for r in range(1, m) for s in range(r + 1, m + 1)]
    return PivotOrdering(tuple(pairs), m)


def _check_permutation(tau, domain) -> tuple[int, ...]:
    tau = tuple(int(x) for x in tau)
    if sorted(tau) != sorted(domain):
        raise OrderingError(f"{tau} is not a permutation of {tuple(domain)}")
    return tau


def serial_with_permutations(m: int, mode: str, taus=None) -> PivotOrdering:
    """Serial ordering with an arbitrary order inside each column or row.

    Column mode: taus[j-3] lists the images (tau_j(1), ..., tau_j(j-1)) for
    j = 3..m.  Row mode runs bottom-up from (m-1, m); taus[i-1] lists
    (tau_i(i+1), ..., tau_i(m)) for i = 1..m-2.  None means identities.
    """
    if m < 2:
        raise OrderingError(f"need m >= 2, got {m}")
    if mode not in ("column", "row"):
        raise OrderingError(f"mode must be 'column' or 'row', got {mode!r}")
    pairs: list[tuple[int, int]] = []
    if mode == "column":
        taus = [None] * max(0, m - 2) if taus is None else list(taus)
        if len(taus) != max(0, m - 2):
            raise OrderingError(f"column mode needs {m - 2} permutations, got {len(taus)}")
        pairs.append((1, 2))
        for j in range(3, m + 1):
            domain = range(1, j)
            tau = tuple(domain) if taus[j - 3] is None else _check_permutation(taus[j - 3], domain)
            pairs.extend((t, j) for t in tau)
    else:
        taus = [None] * max(0, m - 2) if taus is None else list(taus)
        if len(taus) != max(0, m - 2):
            raise OrderingError(f"row mode needs {m - 2} permutations, got {len(taus)}")
        pairs.append((m - 1, m))
        for i in range(m - 2, 0, -1):
            domain = range(i + 1, m + 1)
            tau = tuple(domain) if taus[i - 1] is None else _check_permutation(taus[i - 1], domain)
            pairs.extend((i, t) for t in tau)
    return PivotOrdering(tuple(pairs), m)


def reverse(o: PivotOrdering) -> PivotOrdering:
    return replace(o, pairs=tuple(reversed(o.pairs)), chain_log=o.chain_log + ("reverse",))


def shift(o: PivotOrdering, k: int) -> PivotOrdering:
    """Cyclic rotation [O2, O1] of O = [O1, O2] split at position k."""
    big_m = len(o.pairs)
    if not 0 <= k <= big_m:
        raise OrderingError(f"shift position {k} out of range 0..{big_m}")
    if k in (0, big_m):
        return o
    return replace(
        o,
        pairs=o.pairs[k:] + o.pairs[:k],
        shift_count_d=o.shift_count_d + 1,
        chain_log=o.chain_log + (f"shift k={k}",),
    )


def apply_permutation(o: PivotOrdering, q) -> PivotOrdering:
    """Relabel blocks by a permutation q of {1..m}; pairs are re-sorted.

    Note: relabelling the blocks also permutes the partition the ordering is
    used with.
    """
    q = _check_permutation(q, range(1, o.m + 1))
    mapped = tuple(tuple(sorted((q[i - 1], q[j - 1]))) for i, j in o.pairs)
    return replace(
        o,
        pairs=mapped,
        chain_log=o.chain_log + (f"permute q={q} (relabels the partition blocks)",),
    )


def admissible_transpose(o: PivotOrdering, r: int) -> PivotOrdering:
    """Swap terms r and r+1 (0-based); their index sets must be disjoint."""
    big_m = len(o.pairs)
    if not 0 <= r <= big_m - 2:
        raise OrderingError(f"position {r} out of range 0..{big_m - 2}")
    a, b = o.pairs[r], o.pairs[r + 1]
    if set(a) & set(b):
        raise OrderingError(f"terms {a} and {b} share an index; transposition not admissible")
    pairs = list(o.pairs)
    pairs[r], pairs[r + 1] = pairs[r + 1], pairs[r]
    return replace(o, pairs=tuple(pairs), chain_log=o.chain_log + (f"transpose r={r}",))


def admissible_positions(o: PivotOrdering) -> list[int]:
    """All positions r where an admissible transposition applies."""
    return [
        r
        for r in range(len(o.pairs) - 1)
        if not set(o.pairs[r]) & set(o.pairs[r + 1])
    ]


def are_equivalent(o1: PivotOrdering, o2: PivotOrdering) -> bool:
    """Commutation-class test: equivalent iff every two index-sharing pairs
    keep the same relative order.  Admissible transpositions swap exactly the
    independent adjacent pairs, so this is the reachability criterion."""
    if o1.m != o2.m:
        raise OrderingError(f"orderings over different m: {o1.m} vs {o2.m}")
    pos1 = {p: k for k, p in enumerate(o1.pairs)}
    pos2 = {p: k for k, p in enumerate(o2.pairs)}
    pairs = o1.pairs
    for a in range(len(pairs)):
        for b in range(a + 1, len(pairs)):
            p, q = pairs[a], pairs[b]
            if set(p) & set(q) and (pos2[p] < pos2[q]) != (pos1[p] < pos1[q]):
                return False
    return True


def random_generalized_serial(m: int, seed: int, chain_length: int = 0) -> PivotOrdering:
    """Seeded random generalized serial ordering.

    Starts from a random serial ordering with permutations (random mode,
    random in-column/in-row orders, optional reverse) and applies
    `chain_length` random transforms drawn from admissible transpositions,
    shifts and block relabellings.  Deterministic given (m, seed,
    chain_length); shifts are counted in shift_count_d.
    """
    if m < 2:
        raise OrderingError(f"need m >= 2, got {m}")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(m, chain_length)))
    mode = "column" if rng.integers(2) == 0 else "row"
    if mode == "column":
        taus = [tuple(rng.permutation(np.arange(1, j)).tolist()) for j in range(3, m + 1)]
    else:
        taus = [tuple(rng.permutation(np.arange(i + 1, m + 1)).tolist()) for i in range(1, m - 1)]
    o = serial_with_permutations(m, mode, taus)
    o = replace(o, chain_log=(f"base {mode} taus={taus}",))
    if rng.integers(2) == 1:
        o = reverse(o)
    big_m = len(o.pairs)
    for _ in range(chain_length):
        kind = int(rng.integers(3))
        if kind == 0:
            slots = admissible_positions(o)
            if slots:
                o = admissible_transpose(o, slots[int(rng.integers(len(slots)))])
        elif kind == 1 and big_m > 1:
            o = shift(o, int(rng.integers(1, big_m)))
        else:
            q = tuple((rng.permutation(m) + 1).tolist())
            o = apply_permutation(o, q)
    return o


@dataclass(frozen=True)
class OrderingMatrix:
    """Symmetric m x m step-number table; -1 sentinel on the diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=int)
        object.__setattr__(self, "entries", arr)
        m = arr.shape[0]
        if arr.shape != (m, m) or np.any(np.diagonal(arr) != -1):
            raise OrderingError("ordering matrix must be square with -1 diagonal")
        off = arr[~np.eye(m, dtype=bool)]
        if np.any(arr != arr.T) or sorted(set(off.tolist())) != sorted(
            set(range(m * (m - 1) // 2))
        ):
            raise OrderingError("off-diagonal entries must be a symmetric step numbering")

    def __str__(self) -> str:
        rows = []
        for row in self.entries:
            rows.append(" ".join("*" if v == -1 else str(v) for v in row))
        return "\n".join(rows)


def ordering_matrix(o: PivotOrdering) -> OrderingMatrix:
    arr = -np.ones((o.m, o.m), dtype=int)
    for k, (i, j) in enumerate(o.pairs):
        arr[i - 1, j - 1] = k
        arr[j - 1, i - 1] = k
    return OrderingMatrix(arr)


def ordering_from_matrix(mat: OrderingMatrix) -> PivotOrdering:
    """Reconstruct the pair sequence from the step-number table."""
    arr = mat.entries
    m = arr.shape[0]
    pairs: list[tuple[int, int] | None] = [None] * (m * (m - 1) // 2)
    for r in range(m):
        for s in range(r + 1, m):
            pairs[arr[r, s]] = (r + 1, s + 1)
    return PivotOrdering(tuple(pairs), m)


def write_ordering_text(path, o: PivotOrdering) -> None:
    """Ordering text format: "m d" line, then one "r s" pair per line."""
    with open(path, "w") as fh:
        fh.write(f"{o.m} {o.shift_count_d}\n")
        for r, s in o.pairs:
            fh.write(f"{r} {s}\n")


def read_ordering_text(path) -> PivotOrdering:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise OrderingError(f"{path}: empty ordering file")
    m, d = (int(tok) for tok in lines[0].split())
    pairs = tuple(tuple(int(tok) for tok in ln.split()) for ln in lines[1:])
    chain = ("loaded from file",) if d > 0 else ()
    return PivotOrdering(pairs, m, shift_count_d=d, chain_log=chain)
