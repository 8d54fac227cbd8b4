"""Prime-field linear algebra, span programs, branching programs, LSSS."""

from __future__ import annotations

import random
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from cdslab.algebra import (BranchingProgram, LsssScheme, PrimeField, YES,
                            bp_count, bp_eval_modp, euler_qr, in_span,
                            lsss_privacy_check, lsss_reconstruct, span_and1,
                            span_dnf, span_eq1, span_or1, span_threshold_2of3,
                            sp_eval, SpanProgram)
from cdslab.errors import DomainError, ValidationError

ODD_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59,
              61, 67, 71, 73, 79, 83, 89, 97, 101]


def test_field_ops():
    fld = PrimeField(7)
    assert fld.add(5, 4) == 2
    assert fld.sub(2, 5) == 4
    assert fld.mul(3, 5) == 1
    assert fld.neg(3) == 4
    assert fld.inv(3) == 5
    assert fld.pow(3, 6) == 1
    with pytest.raises(DomainError):
        fld.inv(0)
    with pytest.raises(ValidationError):
        PrimeField(6)


def test_euler_criterion_matches_squaring():
    # oracle: the set of nonzero squares computed by direct squaring
    for p in ODD_PRIMES:
        squares = {(z * z) % p for z in range(1, p)}
        for a in range(1, p):
            assert euler_qr(a, p) == int(a in squares), (p, a)


def test_euler_rejects_zero_and_even():
    with pytest.raises(DomainError):
        euler_qr(0, 7)
    with pytest.raises(DomainError):
        euler_qr(14, 7)
    with pytest.raises(ValidationError):
        euler_qr(1, 2)


def _in_span_brute(rows, target, p):
    for coeffs in product(range(p), repeat=len(rows)):
        if all(sum(c * r[j] for c, r in zip(coeffs, rows)) % p == target[j] % p
               for j in range(len(target))):
            return True
    return False


def test_in_span_against_brute_force():
    rng = random.Random(20260813)
    for _ in range(200):
        p = rng.choice([2, 3, 5])
        d = rng.randrange(0, 4)
        e = rng.randrange(1, 4)
        rows = [tuple(rng.randrange(p) for _ in range(e)) for _ in range(d)]
        target = tuple(rng.randrange(p) for _ in range(e))
        ok, coeffs = in_span(rows, target, p)
        assert ok == _in_span_brute(rows, target, p), (rows, target, p)
        if ok:
            for j in range(e):
                acc = sum(c * r[j] for c, r in zip(coeffs, rows)) % p
                assert acc == target[j] % p


def test_named_span_programs_compute_their_functions():
    for p in (2, 3, 5):
        for prog, rule in [
            (span_and1(p), lambda z: z[0] & z[1]),
            (span_or1(p), lambda z: z[0] | z[1]),
            (span_eq1(p), lambda z: int(z[0] == z[1])),
        ]:
            for z in product((0, 1), repeat=2):
                assert sp_eval(prog, z) == rule(z), (p, z)


def test_threshold_program_all_primes():
    # 2-of-3 majority; p = 2 and 3 cannot place three distinct nonzero
    # interpolation points, so the small primes take a different route
    for p in (2, 3, 5, 7):
        prog = span_threshold_2of3(p)
        for z in product((0, 1), repeat=3):
            assert sp_eval(prog, z) == int(sum(z) >= 2), (p, z)


def test_span_dnf_matches_term_semantics():
    rng = random.Random(7)
    for _ in range(50):
        n_vars = rng.randrange(2, 5)
        n_terms = rng.randrange(1, 4)
        terms = []
        for _ in range(n_terms):
            width = rng.randrange(1, n_vars + 1)
            vs = rng.sample(range(1, n_vars + 1), width)
            terms.append([(v, rng.randrange(2)) for v in vs])
        p = rng.choice([2, 3, 5])
        prog = span_dnf(terms, n_vars, p)
        for z in product((0, 1), repeat=n_vars):
            want = int(any(all(z[v - 1] == b for v, b in t) for t in terms))
            assert sp_eval(prog, z) == want, (terms, z, p)


def test_span_program_validation():
    with pytest.raises(ValidationError):
        SpanProgram(((1,),), ((1, 0),), (0,), 5, 1)  # zero target
    with pytest.raises(ValidationError):
        SpanProgram(((1,), (1, 2)), ((1, 0), (1, 1)), (1,), 5, 1)  # ragged
    with pytest.raises(ValidationError):
        SpanProgram(((1,),), ((3, 0),), (1,), 5, 1)  # label out of range
    with pytest.raises(ValidationError):
        span_dnf([], 2, 5)


def test_span_json_round_trip():
    prog = span_threshold_2of3(5)
    again = SpanProgram.from_json(prog.to_json())
    assert again == prog


def _bp_paths_oracle(bp, z):
    """Count source->t1 / source->t0 paths by explicit DFS enumeration."""
    live = bp.live_edges(z)
    out = {}
    for (u, v) in live:
        out.setdefault(u, []).append(v)

    def count(node, goal):
        if node == goal:
            return 1
        return sum(count(nxt, goal) for nxt in out.get(node, []))

    return (count(bp.source, bp.t1), count(bp.source, bp.t0))


def _diamond_bp():
    # two parallel routes source->t1 when var1 = 1, one route to t0 otherwise
    return BranchingProgram(
        vertices=("s", "a", "b", "acc", "rej"),
        edges=(
            ("s", "a", (1, 1)),
            ("s", "b", (1, 1)),
            ("a", "acc", YES),
            ("b", "acc", (2, 1)),
            ("s", "rej", (1, 0)),
        ),
        source="s", t0="rej", t1="acc", n_vars=2,
    )


def test_bp_count_against_dfs_oracle():
    bp = _diamond_bp()
    for z in product((0, 1), repeat=2):
        assert bp_count(bp, z) == _bp_paths_oracle(bp, z)
    assert bp_count(bp, (1, 1)) == (2, 0)
    # mod 2 the two accepting paths cancel
    assert bp_eval_modp(bp, (1, 1), 2) == 0
    assert bp_eval_modp(bp, (1, 1), 3) == 1


def test_bp_random_graphs_match_oracle():
    rng = random.Random(99)
    for _ in range(40):
        n_mid = rng.randrange(0, 4)
        vertices = ["s"] + [f"m{i}" for i in range(n_mid)] + ["t0", "t1"]
        order = {v: i for i, v in enumerate(vertices)}
        edges = []
        for u in vertices:
            for v in vertices:
                if order[u] < order[v] and rng.random() < 0.5:
                    label = YES if rng.random() < 0.3 else (rng.randrange(1, 3), rng.randrange(2))
                    edges.append((u, v, label))
        bp = BranchingProgram(tuple(vertices), tuple(edges), "s", "t0", "t1", 2)
        for z in product((0, 1), repeat=2):
            want = _bp_paths_oracle(bp, z)
            assert bp_count(bp, z) == want
            for p in (2, 3, 5):
                assert bp_count(bp, z, p) == (want[0] % p, want[1] % p)


def test_bp_cycle_rejected():
    with pytest.raises(ValidationError):
        BranchingProgram(("s", "a", "t0", "t1"),
                         (("s", "a", YES), ("a", "s", YES)),
                         "s", "t0", "t1", 1)


def test_bp_json_round_trip():
    bp = _diamond_bp()
    assert BranchingProgram.from_json(bp.to_json()) == bp


def test_lsss_dichotomy():
    """Authorized subsets reconstruct; unauthorized ones are distribution-blind."""
    for p in (2, 3, 5):
        for prog in (span_and1(p), span_or1(p), span_threshold_2of3(p)):
            scheme = LsssScheme(prog)
            d = scheme.n_shares
            for size in range(d + 1):
                for subset in combinations(range(d), size):
                    rows = [prog.matrix[i] for i in subset]
                    authorized, _ = in_span(rows, prog.target, p)
                    if authorized:
                        for secret in range(p):
                            shares = scheme.share(secret, seed=41 + secret)
                            got = lsss_reconstruct(scheme, subset, [shares[i] for i in subset])
                            assert got == secret
                    else:
                        assert lsss_reconstruct(scheme, subset, [0] * size) is None
                        assert lsss_privacy_check(scheme, subset), (p, subset)


def test_lsss_sharing_vector_properties():
    scheme = LsssScheme(span_threshold_2of3(5))
    t = scheme.program.target
    seen = set()
    for free in product(range(5), repeat=len(t) - 1):
        u = scheme.vector_for(2, free)
        assert sum(a * b for a, b in zip(t, u)) % 5 == 2
        seen.add(u)
    # every valid vector comes from exactly one free assignment
    assert len(seen) == 5 ** (len(t) - 1)


def test_lsss_share_bits():
    scheme = LsssScheme(span_and1(3))
    assert scheme.share_bits == scheme.n_shares * 2  # field elems of Z_3 in 2 bits


@settings(max_examples=60)
@given(st.integers(0, 4), st.sampled_from([2, 3, 5]), st.integers(0, 10 ** 6))
def test_lsss_share_reconstruct_round_trip(secret, p, seed):
    scheme = LsssScheme(span_or1(p))
    shares = scheme.share(secret, seed)
    full = tuple(range(scheme.n_shares))
    assert lsss_reconstruct(scheme, full, shares) == secret % p
