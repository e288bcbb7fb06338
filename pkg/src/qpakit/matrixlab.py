"""Truncated evolution matrices over finite configuration windows.

The configuration space of a pushdown automaton is countable, so matrix
claims are checked on finite rectangular truncations: every
configuration whose stack is at most ``radius + 2`` symbols deep, over
every head position of a fixed framed tape.  Claims are only asserted on
interior indices, where truncation cannot fake or hide a deviation:

* a column is interior when every one-step successor of its
  configuration lies inside the window and no branch runs off the right
  end of the tape;
* a row is interior when every one-step predecessor lies inside the
  window and the head is not on the leftmost cell.  The leftmost cell is
  a tape edge: configurations there can lack advancing predecessors for
  structural reasons, exactly as off-tape successors are a right-edge
  artifact, so edge rows are boundary rather than evidence.

Documentation elsewhere labels rows and columns 1-based; all indices in
this module are 0-based.

The module also ships the standalone fixtures used to probe the banded
matrix facts: a shifted column-isometry whose truncations satisfy
``U*U = I`` while ``UU*`` does not, seeded random banded isometries, and
an associativity probe for banded triples.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
import scipy.sparse as sp

from .evolve import Configuration, TapeContext, step_targets
from .model import Direction, STACK_BASE, QpaError, QpaSpec

DENSE_LIMIT = 512
WINDOW_CAP = 10 ** 6
DEFAULT_MATRIX_TOL = 1e-8


class WindowCapError(QpaError):
    """The requested window would exceed the configuration cap."""


@dataclass(frozen=True)
class ConfigWindow:
    """An ordered finite slab of configuration space for one framed tape."""

    tape: TapeContext
    configs: tuple[Configuration, ...]
    index: dict[Configuration, int]
    interior_cols: frozenset[int]
    interior_rows: frozenset[int]
    stack_limit: int

    def __len__(self) -> int:
        return len(self.configs)


@dataclass(frozen=True)
class TruncatedMatrix:
    """Sparse complex matrix with explicit interior index sets."""

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    interior_cols: frozenset[int]
    interior_rows: frozenset[int]

    def to_sparse(self) -> sp.csc_matrix:
        return sp.csc_matrix(
            (self.vals, (self.rows, self.cols)), shape=(self.dim, self.dim))

    def to_dense(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim), dtype=complex)
        np.add.at(m, (self.rows, self.cols), self.vals)
        return m

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = np.zeros(self.dim, dtype=complex)
        np.add.at(y, self.rows, self.vals * x[self.cols])
        return y

    def triplets(self) -> list[tuple[int, int, float, float]]:
        order = np.lexsort((self.rows, self.cols))
        return [
            (int(self.rows[i]), int(self.cols[i]),
             float(self.vals[i].real), float(self.vals[i].imag))
            for i in order
        ]


@dataclass(frozen=True)
class UnitarityReport:
    col_deviation: float
    row_deviation: float
    n_interior_cols: int
    n_interior_rows: int
    tolerance: float
    passed: bool


def _matrix_from_triplets(dim, rows, cols, vals, interior_cols, interior_rows) -> TruncatedMatrix:
    return TruncatedMatrix(
        dim=dim,
        rows=np.asarray(rows, dtype=np.int64),
        cols=np.asarray(cols, dtype=np.int64),
        vals=np.asarray(vals, dtype=complex),
        interior_cols=frozenset(interior_cols),
        interior_rows=frozenset(interior_rows),
    )


# --- windows over configuration space ----------------------------------------


def _enumerate_stacks(t_symbols: tuple[str, ...], stack_limit: int) -> list[tuple[str, ...]]:
    out: list[tuple[str, ...]] = []
    for depth in range(stack_limit):
        for tail in product(t_symbols, repeat=depth):
            out.append((STACK_BASE, *tail))
    return out


def _count_stacks(n_symbols: int, stack_limit: int) -> int:
    if n_symbols == 0:
        return 1
    if n_symbols == 1:
        return stack_limit
    return (n_symbols ** stack_limit - 1) // (n_symbols - 1)


def enumerate_window(spec: QpaSpec, word, radius: int, cap: int = WINDOW_CAP) -> ConfigWindow:
    """Rectangular window: all stacks up to depth ``radius + 2`` over the tape.

    The depth budget covers everything a run can reach in ``radius``
    steps plus one padding layer, so depth-``radius + 1`` rows and
    columns can still be interior.  Interior sets are computed exactly
    from the transition relation, never guessed from index position.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    tape = TapeContext.from_word(spec, word)
    stack_limit = radius + 2
    n_states = len(spec.states)
    n_stacks = _count_stacks(len(spec.alphabets.t), stack_limit)
    predicted = n_states * len(tape) * n_stacks
    if predicted > cap:
        raise WindowCapError(
            f"window of {predicted} configurations exceeds the cap of {cap}")

    stacks = _enumerate_stacks(spec.alphabets.t_sorted(), stack_limit)
    configs = sorted(
        Configuration(q, h, s)
        for q in spec.states
        for h in range(len(tape))
        for s in stacks
    )
    index = {c: i for i, c in enumerate(configs)}

    interior_cols = set()
    for i, c in enumerate(configs):
        targets, overran = step_targets(spec, tape, c)
        if overran:
            continue
        if all(t in index for t, _ in targets):
            interior_cols.add(i)

    by_target = _predecessor_index(spec)
    interior_rows = set()
    for i, c in enumerate(configs):
        if c.head == 0:
            continue
        if _preds_inside(spec, tape, c, by_target, stack_limit):
            interior_rows.add(i)

    return ConfigWindow(
        tape=tape,
        configs=tuple(configs),
        index=index,
        interior_cols=frozenset(interior_cols),
        interior_rows=frozenset(interior_rows),
        stack_limit=stack_limit,
    )


def _predecessor_index(spec: QpaSpec):
    """(target state, tape symbol, direction) -> [(source state, popped, push word, amp)]."""
    cached = getattr(spec, "_pred_index", None)
    if cached is None:
        cached = {}
        for k in spec.sorted_keys():
            cached.setdefault((k.q, k.sigma, k.d), []).append(
                (k.q1, k.tau, k.omega, spec.delta[k]))
        object.__setattr__(spec, "_pred_index", cached)
    return cached


def predecessors(spec: QpaSpec, tape: TapeContext, config: Configuration
                 ) -> list[tuple[Configuration, complex]]:
    """All configurations that reach ``config`` in one step, with amplitudes.

    Inverts the transition relation: a push word must be a suffix of the
    target stack, and the source stack is the remaining prefix with the
    popped symbol back on top.
    """
    by_target = _predecessor_index(spec)
    out: list[tuple[Configuration, complex]] = []
    for d, head in ((Direction.STAY, config.head), (Direction.ADVANCE, config.head - 1)):
        if head < 0:
            continue
        sigma = tape.symbols[head]
        for q1, tau, omega, amp in by_target.get((config.state, sigma, d), ()):
            n = len(omega)
            if n and config.stack[len(config.stack) - n:] != omega:
                continue
            base = config.stack[:len(config.stack) - n]
            if (tau == STACK_BASE) != (len(base) == 0):
                continue
            source = Configuration(q1, head, base + (tau,))
            out.append((source, amp))
    return out


def _preds_inside(spec, tape, config, by_target, stack_limit) -> bool:
    for d, head in ((Direction.STAY, config.head), (Direction.ADVANCE, config.head - 1)):
        if head < 0:
            continue
        sigma = tape.symbols[head]
        for q1, tau, omega, amp in by_target.get((config.state, sigma, d), ()):
            n = len(omega)
            if n and config.stack[len(config.stack) - n:] != omega:
                continue
            base = config.stack[:len(config.stack) - n]
            if (tau == STACK_BASE) != (len(base) == 0):
                continue
            if len(base) + 1 > stack_limit:
                return False
    return True


def build_matrix(spec: QpaSpec, window: ConfigWindow) -> TruncatedMatrix:
    """Entry (r, c): amplitude with which configuration c maps to r in one step."""
    rows: list[int] = []
    cols: list[int] = []
    vals: list[complex] = []
    for c_idx, config in enumerate(window.configs):
        targets, _ = step_targets(spec, window.tape, config)
        for target, amp in targets:
            r_idx = window.index.get(target)
            if r_idx is not None:
                rows.append(r_idx)
                cols.append(c_idx)
                vals.append(amp)
    return _matrix_from_triplets(
        len(window.configs), rows, cols, vals,
        window.interior_cols, window.interior_rows)


# --- unitarity checks ---------------------------------------------------------


def _col_gram_deviation(matrix: TruncatedMatrix, storage: str) -> float:
    interior = sorted(matrix.interior_cols)
    if not interior:
        return 0.0
    k = len(interior)
    if storage == "dense":
        sub = matrix.to_dense()[:, interior]
        gram = sub.conj().T @ sub
        return float(np.abs(gram - np.eye(k)).max())
    sub = matrix.to_sparse()[:, interior]
    gram = (sub.getH() @ sub).tocoo()
    dev = 0.0
    seen_diag = np.zeros(k, dtype=bool)
    for r, c, v in zip(gram.row, gram.col, gram.data):
        target = 1.0 if r == c else 0.0
        if r == c:
            seen_diag[r] = True
        dev = max(dev, abs(v - target))
    if not seen_diag.all():
        dev = max(dev, 1.0)
    return float(dev)


def _row_norms_squared(matrix: TruncatedMatrix) -> np.ndarray:
    out = np.zeros(matrix.dim, dtype=float)
    np.add.at(out, matrix.rows, np.abs(matrix.vals) ** 2)
    return out


def _row_deviation(matrix: TruncatedMatrix) -> float:
    interior = sorted(matrix.interior_rows)
    if not interior:
        return 0.0
    norms2 = _row_norms_squared(matrix)[interior]
    return float(np.abs(norms2 - 1.0).max())


def check_truncated_unitarity(matrix: TruncatedMatrix,
                              tol: float = DEFAULT_MATRIX_TOL,
                              storage: str = "auto") -> UnitarityReport:
    """Interior columns pairwise orthonormal and interior rows unit-norm.

    ``storage`` selects the dense or sparse code path; "auto" uses dense
    below 512 and sparse above, and both paths give identical results.
    """
    if storage == "auto":
        storage = "dense" if matrix.dim < DENSE_LIMIT else "sparse"
    if storage not in ("dense", "sparse"):
        raise ValueError(f"unknown storage {storage!r}")
    col_dev = _col_gram_deviation(matrix, storage)
    row_dev = _row_deviation(matrix)
    return UnitarityReport(
        col_deviation=col_dev,
        row_deviation=row_dev,
        n_interior_cols=len(matrix.interior_cols),
        n_interior_rows=len(matrix.interior_rows),
        tolerance=tol,
        passed=col_dev <= tol and row_dev <= tol,
    )


def row_norm_bound_probe(matrix: TruncatedMatrix, tol: float = 1e-9) -> float:
    """Max interior row norm of a verified column-isometry.

    Refuses to answer unless the interior columns are orthonormal, since
    the bound only holds for isometries.
    """
    col_dev = _col_gram_deviation(
        matrix, "dense" if matrix.dim < DENSE_LIMIT else "sparse")
    if col_dev > tol:
        raise QpaError(
            f"interior columns are not orthonormal (deviation {col_dev:.3g}); "
            "row bound not applicable")
    interior = sorted(matrix.interior_rows)
    if not interior:
        return 0.0
    norms2 = _row_norms_squared(matrix)[interior]
    return float(np.sqrt(norms2.max()))


def interior_row_norms(matrix: TruncatedMatrix) -> np.ndarray:
    interior = sorted(matrix.interior_rows)
    return np.sqrt(_row_norms_squared(matrix)[interior])


def rows_pairwise_orthogonal_deviation(matrix: TruncatedMatrix) -> float:
    """Max |inner product| over distinct interior row pairs."""
    interior = sorted(matrix.interior_rows)
    if len(interior) < 2:
        return 0.0
    dense = matrix.to_dense()[interior, :]
    gram = dense @ dense.conj().T
    np.fill_diagonal(gram, 0.0)
    return float(np.abs(gram).max())


# --- fixtures and probes --------------------------------------------------------


def shift_fixture(n: int) -> TruncatedMatrix:
    """Truncation of the shifted column-isometry with a split first column.

    Column 0 is (1/sqrt2, 1/sqrt2, 0, ...); column c >= 1 is the basis
    vector c + 1.  Columns 0..n-2 are interior (the last column's true
    entry falls outside the truncation); every row is interior.
    """
    if n < 3:
        raise ValueError("fixture needs dimension at least 3")
    inv = 1.0 / np.sqrt(2.0)
    rows = [0, 1] + [c + 1 for c in range(1, n - 1)]
    cols = [0, 0] + list(range(1, n - 1))
    vals = [inv, inv] + [1.0] * (n - 2)
    return _matrix_from_triplets(n, rows, cols, vals, range(n - 1), range(n))


def banded_associativity_probe(a: TruncatedMatrix, b: TruncatedMatrix,
                               c: TruncatedMatrix) -> float:
    """Max entrywise deviation between (AB)C and A(BC)."""
    if not (a.dim == b.dim == c.dim):
        raise ValueError("dimension mismatch")
    if a.dim < DENSE_LIMIT:
        am, bm, cm = a.to_dense(), b.to_dense(), c.to_dense()
        left = (am @ bm) @ cm
        right = am @ (bm @ cm)
        return float(np.abs(left - right).max())
    am, bm, cm = a.to_sparse(), b.to_sparse(), c.to_sparse()
    diff = ((am @ bm) @ cm - am @ (bm @ cm)).tocoo()
    return float(np.abs(diff.data).max()) if diff.nnz else 0.0


def random_banded_matrix(n: int, bandwidth: int, seed: int,
                         complex_entries: bool = True) -> TruncatedMatrix:
    """Seeded random matrix supported on a band around the diagonal."""
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n))
    if complex_entries:
        m = m + 1j * rng.standard_normal((n, n))
    r, c = np.indices((n, n))
    m[np.abs(r - c) > bandwidth] = 0.0
    rows, cols = np.nonzero(m)
    return _matrix_from_triplets(n, rows, cols, m[rows, cols], range(n), range(n))


def random_banded_isometry(n: int, m: int, bandwidth: int, seed: int) -> TruncatedMatrix:
    """Orthonormalized random banded columns; an exact n x m column-isometry.

    QR factorization of a banded matrix keeps the lower profile, so the
    result stays banded; dropping trailing columns (m < n) leaves the
    remaining columns orthonormal while freeing some rows to have norm
    below one.  Returned as an n x n matrix whose last n - m columns are
    zero and excluded from the interior set.
    """
    if not (1 <= m <= n):
        raise ValueError("need 1 <= m <= n")
    base = random_banded_matrix(n, bandwidth, seed).to_dense()
    q, _ = np.linalg.qr(base)
    q = q[:, :m]
    rows, cols = np.nonzero(q)
    keep = np.abs(q[rows, cols]) > 0.0
    return _matrix_from_triplets(
        n, rows[keep], cols[keep], q[rows, cols][keep], range(m), range(n))


def random_partial_permutation(n: int, m: int, max_shift: int, seed: int) -> TruncatedMatrix:
    """Signed partial permutation: m distinct basis columns inside a band.

    Columns are orthonormal and every row norm is exactly 0 or 1, so the
    rows are pairwise orthogonal.
    """
    if not (1 <= m <= n):
        raise ValueError("need 1 <= m <= n")
    rng = np.random.default_rng(seed)
    targets: list[int] = []
    used = set()
    for j in range(m):
        lo = max(0, j - max_shift)
        hi = min(n - 1, j + max_shift)
        choices = [r for r in range(lo, hi + 1) if r not in used]
        if not choices:
            choices = [r for r in range(n) if r not in used]
        r = int(rng.choice(choices))
        used.add(r)
        targets.append(r)
    signs = rng.choice([-1.0, 1.0], size=m)
    return _matrix_from_triplets(
        n, targets, list(range(m)), signs, range(m), range(n))


# --- vectors over windows -------------------------------------------------------


def superposition_to_vector(window: ConfigWindow, psi) -> np.ndarray:
    vec = np.zeros(len(window.configs), dtype=complex)
    for config, amp in psi.amplitudes.items():
        idx = window.index.get(config)
        if idx is None:
            raise QpaError(f"configuration {config} lies outside the window")
        vec[idx] = amp
    return vec


def vector_to_superposition(window: ConfigWindow, vec: np.ndarray, prune_eps: float = 0.0):
    from .evolve import Superposition

    amps = {
        window.configs[i]: complex(vec[i])
        for i in np.nonzero(np.abs(vec) > prune_eps)[0]
    }
    return Superposition(amps)


def matrix_to_dict(matrix: TruncatedMatrix) -> dict:
    return {
        "dim": matrix.dim,
        "interior_cols": sorted(matrix.interior_cols),
        "interior_rows": sorted(matrix.interior_rows),
        "triplets": [list(t) for t in matrix.triplets()],
    }


def matrix_to_text(matrix: TruncatedMatrix, max_dim: int = 24) -> str:
    """Plain-text grid for small matrices; real parts only when all-real."""
    if matrix.dim > max_dim:
        return f"<{matrix.dim}x{matrix.dim} matrix; too large to print>"
    dense = matrix.to_dense()
    all_real = bool(np.all(dense.imag == 0.0))
    lines = []
    for r in range(matrix.dim):
        cells = []
        for c in range(matrix.dim):
            v = dense[r, c]
            cells.append(f"{v.real:8.4f}" if all_real else f"{v.real:7.3f}{v.imag:+7.3f}i")
        lines.append(" ".join(cells))
    return "\n".join(lines)
