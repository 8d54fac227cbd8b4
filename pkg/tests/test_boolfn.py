"""Truth-table functions: indexing, named families, split-integer helpers."""

from __future__ import annotations

import pytest
from hypothesis import assume, given, strategies as st

from cdslab.boolfn import (BoolFn, all_functions, bits_msb_first, from_table,
                           literal_input, named_fn, qr_join, qr_residues,
                           qr_split_inputs)
from cdslab.errors import DomainError, ValidationError


def test_table_indexing_order():
    # table[(x << n_y) | y]: enumerate explicitly to pin the convention
    f = from_table(1, 2, (0, 1, 0, 0, 1, 1, 0, 1))
    expected = {(0, 0): 0, (0, 1): 1, (0, 2): 0, (0, 3): 0,
                (1, 0): 1, (1, 1): 1, (1, 2): 0, (1, 3): 1}
    for (x, y), v in expected.items():
        assert f.eval(x, y) == v


def test_named_families_frozen_tables():
    assert named_fn("and", n=1).table == (0, 0, 0, 1)
    assert named_fn("or", n=1).table == (0, 1, 1, 1)
    assert named_fn("xor", n=1).table == (0, 1, 1, 0)
    assert named_fn("eq", n=1).table == (1, 0, 0, 1)
    assert named_fn("ip", n=1).table == (0, 0, 0, 1)
    # index over a 2-bit database: f(x, y) = bit x of y
    idx = named_fn("index", n_x=1)
    assert (idx.n_x, idx.n_y) == (1, 2)
    assert [idx.eval(0, y) for y in range(4)] == [0, 1, 0, 1]
    assert [idx.eval(1, y) for y in range(4)] == [0, 0, 1, 1]


def test_two_bit_families_against_direct_rules():
    fa, fx = named_fn("and", n=2), named_fn("xor", n=2)
    fe, fi = named_fn("eq", n=2), named_fn("ip", n=2)
    for x in range(4):
        for y in range(4):
            assert fa.eval(x, y) == int(x == 3 and y == 3)
            assert fx.eval(x, y) == bin(x ^ y).count("1") % 2
            assert fe.eval(x, y) == int(x == y)
            assert fi.eval(x, y) == bin(x & y).count("1") % 2


def test_qr_residue_oracle():
    assert qr_residues(7) == {0, 1, 2, 4}
    assert qr_residues(11) == {0, 1, 3, 4, 5, 9}


def test_qr_split_function_values():
    f = named_fn("qr", p=7)
    assert f.params["n_bits"] == 3
    assert f.params["alice_positions"] == [1]
    residues = {(z * z) % 7 for z in range(7)}  # 0 counts as a square
    for a in range(8):
        x, y = qr_split_inputs(f, a)
        assert qr_join(f, x, y) == a
        assert f.eval(x, y) == int(a % 7 in residues)


def test_qr_split_custom_positions():
    f = named_fn("qr", p=11, alice_positions=(2, 4))
    assert f.n_x == 2 and f.n_y == 2
    for a in range(16):
        x, y = qr_split_inputs(f, a)
        assert qr_join(f, x, y) == a


def test_qr_rejects_even_prime():
    with pytest.raises(ValidationError):
        named_fn("qr", p=2)


def test_literal_input_is_msb_first():
    f = from_table(2, 1, (0,) * 8)
    assert literal_input(f, 0b10, 1) == (1, 0, 1)
    assert bits_msb_first(6, 4) == (0, 1, 1, 0)


def test_eval_range_checks():
    f = named_fn("and", n=1)
    with pytest.raises(DomainError):
        f.eval(2, 0)
    with pytest.raises(DomainError):
        f.eval(0, -1)


def test_zero_finding_and_constants():
    f = named_fn("or", n=1)
    assert f.find_zero_input() == (0, 0)
    ones = from_table(1, 1, (1, 1, 1, 1))
    assert ones.find_zero_input() is None
    assert ones.is_constant()
    assert not f.is_constant()
    assert set(f.ones()) | set(f.zeros()) == set(f.inputs())


def test_all_functions_enumeration():
    fns = list(all_functions(1, 1))
    assert len(fns) == 16
    tables = {f.table for f in fns}
    assert len(tables) == 16


def test_unknown_family():
    with pytest.raises(ValidationError):
        named_fn("nope")


@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2 ** 16 - 1))
def test_json_round_trip(n_x, n_y, packed):
    assume(n_x + n_y > 0)
    size = 1 << (n_x + n_y)
    table = tuple((packed >> i) & 1 for i in range(size))
    f = BoolFn(n_x, n_y, table, name="t")
    g = BoolFn.from_json(f.to_json())
    assert g == f


@given(st.integers(1, 2), st.integers(1, 2), st.data())
def test_eval_matches_table(n_x, n_y, data):
    size = 1 << (n_x + n_y)
    table = tuple(data.draw(st.integers(0, 1)) for _ in range(size))
    f = BoolFn(n_x, n_y, table)
    x = data.draw(st.integers(0, (1 << n_x) - 1))
    y = data.draw(st.integers(0, (1 << n_y) - 1))
    assert f.eval(x, y) == table[(x << n_y) | y]


def test_table_length_validation():
    with pytest.raises(ValidationError):
        BoolFn(1, 1, (0, 1, 0))
    with pytest.raises(ValidationError):
        BoolFn(1, 1, (0, 1, 2, 0))
