"""Finite-field linear algebra, span programs, branching programs, and LSSS.

Everything here is exact integer arithmetic mod a prime; no floats. Matrices
are tuples of tuples so program descriptors stay hashable and immutable.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import product

from .boolfn import is_prime
from .errors import DomainError, ValidationError


@dataclass(frozen=True)
class PrimeField:
    """Arithmetic in Z_p for prime p."""

    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValidationError(f"{self.p} is not prime")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise DomainError("0 has no inverse")
        return pow(a, -1, self.p)

    def pow(self, a, e):
        return pow(a, e, self.p)

    def elements(self):
        return range(self.p)


def euler_qr(a: int, p: int) -> int:
    """Quadratic-residue indicator via Euler's criterion: a^((p-1)/2) mod p.

    Returns 1 if a is a nonzero square mod p, else 0. a = 0 is rejected:
    the criterion evaluates to 0 there, which is neither label.
    """
    if not is_prime(p) or p == 2:
        raise ValidationError(f"p={p} must be an odd prime")
    if a % p == 0:
        raise DomainError("a = 0 mod p is outside the residue/non-residue split")
    return int(pow(a, (p - 1) // 2, p) == 1)


# -- linear span -------------------------------------------------------------


def in_span(rows, target, p: int):
    """Decide whether ``target`` lies in the row span of ``rows`` over Z_p.

    Args:
        rows: sequence of equal-length vectors (the candidate spanning set).
        target: vector of the same length.
        p: prime modulus.

    Returns:
        (True, coeffs) with ``sum(coeffs[i] * rows[i]) == target`` mod p,
        or (False, None). The witness is exact and re-verified before return.
    """
    fld = PrimeField(p)
    e = len(target)
    d = len(rows)
    for r in rows:
        if len(r) != e:
            raise ValidationError("row length mismatch")
    # Solve A c = t where A's columns are the rows (A is e x d).
    aug = [[rows[i][j] % p for i in range(d)] + [target[j] % p] for j in range(e)]
    pivots = []  # (row index in aug, variable index)
    rank_row = 0
    for col in range(d):
        pivot = next((r for r in range(rank_row, e) if aug[r][col] != 0), None)
        if pivot is None:
            continue
        aug[rank_row], aug[pivot] = aug[pivot], aug[rank_row]
        inv = fld.inv(aug[rank_row][col])
        aug[rank_row] = [fld.mul(v, inv) for v in aug[rank_row]]
        for r in range(e):
            if r != rank_row and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [fld.sub(v, fld.mul(factor, w)) for v, w in zip(aug[r], aug[rank_row])]
        pivots.append((rank_row, col))
        rank_row += 1
    # Inconsistent if a zero row has nonzero rhs.
    for r in range(rank_row, e):
        if aug[r][d] != 0:
            return (False, None)
    coeffs = [0] * d
    for row_i, var_i in pivots:
        coeffs[var_i] = aug[row_i][d]
    # Free variables stay 0. Re-verify.
    for j in range(e):
        acc = 0
        for i in range(d):
            acc = (acc + coeffs[i] * rows[i][j]) % p
        if acc != target[j] % p:
            raise AssertionError("elimination produced a bad witness")
    return (True, coeffs)


# -- span programs -----------------------------------------------------------


@dataclass(frozen=True)
class SpanProgram:
    """Monotone-literal span program over Z_p.

    Row i is labelled with a literal (var, bit): the row becomes available on
    input z exactly when z[var-1] == bit. The program accepts z when the
    target vector lies in the span of the available rows. Variables are
    1-based; on two-party inputs, variables 1..n_x are Alice's bits (reading
    order) and n_x+1..n_x+n_y Bob's.
    """

    matrix: tuple          # d rows, each a tuple of e field elements
    labels: tuple          # d pairs (var, bit)
    target: tuple          # length e, nonzero
    p: int
    n_vars: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValidationError(f"p={self.p} not prime")
        d = len(self.matrix)
        if d == 0:
            raise ValidationError("empty span program")
        e = len(self.target)
        if any(len(row) != e for row in self.matrix):
            raise ValidationError("ragged matrix")
        if all(v % self.p == 0 for v in self.target):
            raise ValidationError("target must be nonzero")
        if len(self.labels) != d:
            raise ValidationError("one label per row required")
        for (var, bit) in self.labels:
            if not 1 <= var <= self.n_vars:
                raise ValidationError(f"label variable {var} outside 1..{self.n_vars}")
            if bit not in (0, 1):
                raise ValidationError("label bit must be 0 or 1")

    @property
    def size(self) -> int:
        return len(self.matrix)

    @property
    def width(self) -> int:
        return len(self.target)

    def available_rows(self, z) -> list:
        """Indices of rows whose literal matches assignment z (bit tuple)."""
        if len(z) != self.n_vars:
            raise DomainError(f"assignment length {len(z)} != {self.n_vars}")
        return [i for i, (var, bit) in enumerate(self.labels) if z[var - 1] == bit]

    def to_json(self) -> str:
        obj = {
            "matrix": [list(r) for r in self.matrix],
            "labels": [list(l) for l in self.labels],
            "target": list(self.target),
            "p": self.p,
            "n_vars": self.n_vars,
        }
        return json.dumps(obj, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "SpanProgram":
        obj = json.loads(text)
        return SpanProgram(
            tuple(tuple(r) for r in obj["matrix"]),
            tuple(tuple(l) for l in obj["labels"]),
            tuple(obj["target"]),
            int(obj["p"]),
            int(obj["n_vars"]),
        )


def sp_eval(program: SpanProgram, z) -> int:
    """1 if the target is spanned by the rows available on assignment z."""
    rows = [program.matrix[i] for i in program.available_rows(z)]
    ok, _ = in_span(rows, program.target, program.p)
    return int(ok)


def span_dnf(terms, n_vars: int, p: int) -> SpanProgram:
    """Span program for an OR of literal conjunctions.

    Each term is an iterable of literals (var, bit); a term fires when all its
    literals match. The program has one row per literal: within a term the
    rows sum to the target through term-private columns, so partial terms and
    cross-term mixtures never reach it.
    """
    terms = [tuple(t) for t in terms]
    if not terms:
        raise ValidationError("need at least one term")
    extra = sum(len(t) - 1 for t in terms)
    e = 1 + extra
    target = tuple([1] + [0] * extra)
    rows = []
    labels = []
    col = 1
    for term in terms:
        k = len(term)
        if k == 0:
            raise ValidationError("empty term")
        if k == 1:
            rows.append(target)
            labels.append(term[0])
            continue
        # literal 1 carries the target plus the first private column; each
        # following literal cancels one private column and raises the next.
        for j, lit in enumerate(term):
            row = [0] * e
            if j == 0:
                row[0] = 1
                row[col] = 1
            elif j < k - 1:
                row[col + j - 1] = p - 1
                row[col + j] = 1
            else:
                row[col + j - 1] = p - 1
            rows.append(tuple(row))
            labels.append(lit)
        col += k - 1
    return SpanProgram(tuple(rows), tuple(labels), target, p, n_vars)


def span_and1(p: int) -> SpanProgram:
    """x AND y on one bit per side: two rows splitting the target."""
    return SpanProgram(((1, 0), (0, 1)), ((1, 1), (2, 1)), (1, 1), p, 2)


def span_or1(p: int) -> SpanProgram:
    """x OR y on one bit per side: either row alone is the target."""
    return SpanProgram(((1,), (1,)), ((1, 1), (2, 1)), (1,), p, 2)


def span_eq1(p: int) -> SpanProgram:
    """x == y on one bit per side: two 2-literal terms."""
    return span_dnf([[(1, 1), (2, 1)], [(1, 0), (2, 0)]], 2, p)


def span_threshold_2of3(p: int) -> SpanProgram:
    """At least two of three input bits set.

    Over fields with p >= 5 this is Shamir interpolation through the points
    1, 2, 3, which must be distinct and nonzero mod p; smaller fields cannot
    host three such points, so they use the DNF construction (6 rows).
    """
    if p <= 3:
        return span_dnf([[(1, 1), (2, 1)], [(1, 1), (3, 1)], [(2, 1), (3, 1)]], 3, p)
    rows = tuple((1, k) for k in range(1, 4))
    labels = tuple((k, 1) for k in range(1, 4))
    return SpanProgram(rows, labels, (1, 0), p, 3)


# -- branching programs ------------------------------------------------------

YES = "yes"


@dataclass(frozen=True)
class BranchingProgram:
    """DAG whose s->t1 / s->t0 path counts decide acceptance.

    Edges carry either the label "yes" (always live) or a pair (var, bit),
    live exactly when the input's var-th bit equals the label's bit (variables
    1-based, inputs read MSB-first as in ``literal_input``).
    """

    vertices: tuple
    edges: tuple            # (u, v, label); label is YES or (var, bit)
    source: object
    t0: object
    t1: object
    n_vars: int

    def __post_init__(self):
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise ValidationError("duplicate vertices")
        for node in (self.source, self.t0, self.t1):
            if node not in vset:
                raise ValidationError(f"distinguished vertex {node!r} missing")
        if self.t0 == self.t1:
            raise ValidationError("t0 and t1 must differ")
        for (u, v, label) in self.edges:
            if u not in vset or v not in vset:
                raise ValidationError(f"edge ({u!r}, {v!r}) uses unknown vertex")
            if label != YES:
                var, bit = label
                if not 1 <= var <= self.n_vars or bit not in (0, 1):
                    raise ValidationError(f"bad edge label {label!r}")
        self._topo_order()  # raises on cycles

    def _topo_order(self) -> list:
        order = []
        indeg = {v: 0 for v in self.vertices}
        for (u, v, _) in self.edges:
            indeg[v] += 1
        ready = [v for v in self.vertices if indeg[v] == 0]
        while ready:
            node = ready.pop()
            order.append(node)
            for (u, v, _) in self.edges:
                if u == node:
                    indeg[v] -= 1
                    if indeg[v] == 0:
                        ready.append(v)
        if len(order) != len(self.vertices):
            raise ValidationError("branching program graph has a cycle")
        return order

    def live_edges(self, z) -> list:
        if len(z) != self.n_vars:
            raise DomainError(f"assignment length {len(z)} != {self.n_vars}")
        live = []
        for (u, v, label) in self.edges:
            if label == YES or z[label[0] - 1] == label[1]:
                live.append((u, v))
        return live

    def to_json(self) -> str:
        obj = {
            "vertices": list(self.vertices),
            "edges": [[u, v, ("yes" if label == YES else list(label))]
                      for (u, v, label) in self.edges],
            "source": self.source,
            "t0": self.t0,
            "t1": self.t1,
            "n_vars": self.n_vars,
        }
        return json.dumps(obj, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "BranchingProgram":
        obj = json.loads(text)
        edges = tuple(
            (u, v, YES if label == "yes" else (int(label[0]), int(label[1])))
            for (u, v, label) in obj["edges"]
        )
        return BranchingProgram(tuple(obj["vertices"]), edges, obj["source"],
                                obj["t0"], obj["t1"], int(obj["n_vars"]))


def bp_count(program: BranchingProgram, z, p: int = 0) -> tuple:
    """Path counts (to t1, to t0) over live edges, mod p (p = 0: exact).

    Dynamic programming over a topological order; z is a bit tuple of length
    n_vars.
    """
    if p and not is_prime(p):
        raise ValidationError(f"modulus {p} must be prime or 0")
    live = program.live_edges(z)
    counts = {v: 0 for v in program.vertices}
    counts[program.source] = 1
    for node in program._topo_order():
        c = counts[node]
        if c == 0:
            continue
        for (u, v) in live:
            if u == node:
                counts[v] = counts[v] + c if p == 0 else (counts[v] + c) % p
    return (counts[program.t1], counts[program.t0])


def bp_eval_modp(program: BranchingProgram, z, p: int) -> int:
    """Accept iff the t1 path count is nonzero mod p."""
    acc, _ = bp_count(program, z, p)
    return int(acc % p != 0)


# -- linear secret sharing ---------------------------------------------------


@dataclass(frozen=True)
class LsssScheme:
    """Linear secret sharing induced by a span program.

    The sharing vector u is uniform over { u : <target, u> = s }; share i is
    <row_i, u>. A row subset reconstructs exactly when the target lies in its
    span, and is blind to the secret otherwise (the classic dichotomy, which
    ``lsss_privacy_check`` verifies by enumeration rather than assuming).
    """

    program: SpanProgram

    @property
    def p(self) -> int:
        return self.program.p

    @property
    def n_shares(self) -> int:
        return self.program.size

    @property
    def share_bits(self) -> int:
        elem_bits = max(1, (self.p - 1).bit_length())
        return self.n_shares * elem_bits

    def _pivot(self) -> int:
        t = self.program.target
        return next(j for j in range(len(t)) if t[j] % self.p != 0)

    def vector_for(self, secret: int, free) -> tuple:
        """Sharing vector with the pivot coordinate solved for the secret.

        ``free`` supplies the other len(target) - 1 coordinates; every vector
        with <target, u> = secret arises from exactly one choice of free
        coordinates, so uniform free coordinates give the uniform sharing.
        """
        fld = PrimeField(self.p)
        t = self.program.target
        j = self._pivot()
        u = [0] * len(t)
        free = list(free)
        if len(free) != len(t) - 1:
            raise DomainError("wrong number of free coordinates")
        idx = 0
        for k in range(len(t)):
            if k != j:
                u[k] = free[idx] % self.p
                idx += 1
        acc = sum(t[k] * u[k] for k in range(len(t)) if k != j) % self.p
        u[j] = fld.mul(fld.sub(secret, acc), fld.inv(t[j]))
        return tuple(u)

    def shares_from_vector(self, u) -> tuple:
        return tuple(sum(r * v for r, v in zip(row, u)) % self.p
                     for row in self.program.matrix)

    def share(self, secret: int, seed: int) -> tuple:
        """Deterministic sharing: free coordinates drawn from random.Random(seed)."""
        rng = random.Random(seed)
        free = [rng.randrange(self.p) for _ in range(len(self.program.target) - 1)]
        return self.shares_from_vector(self.vector_for(secret % self.p, free))


def lsss_reconstruct(scheme: LsssScheme, subset, shares):
    """Recombine shares of ``subset`` (row indices); None if unauthorized."""
    rows = [scheme.program.matrix[i] for i in subset]
    ok, coeffs = in_span(rows, scheme.program.target, scheme.p)
    if not ok:
        return None
    return sum(c * s for c, s in zip(coeffs, shares)) % scheme.p


def lsss_privacy_check(scheme: LsssScheme, subset) -> bool:
    """True iff the subset's joint share distribution is secret-independent.

    Exact enumeration over all sharing vectors for each secret value.
    """
    p = scheme.p
    e = len(scheme.program.target)
    dists = []
    for secret in range(p):
        hist = {}
        for free in product(range(p), repeat=e - 1):
            u = scheme.vector_for(secret, free)
            shares = scheme.shares_from_vector(u)
            key = tuple(shares[i] for i in subset)
            hist[key] = hist.get(key, 0) + 1
        dists.append(hist)
    return all(d == dists[0] for d in dists[1:])
