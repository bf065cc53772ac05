import random
from fractions import Fraction

import pytest

from relcore.atoms import (
    DLO,
    PURE_SET,
    Atom,
    AtomSample,
    insert_between,
    labeled_dlo,
    make_sample,
    order_type,
)
from relcore.errors import BaseMismatch, InvalidLabel, NotAnInterval


def test_make_sample_plain():
    s = make_sample(DLO, 3)
    assert [a.value for a in s.atoms] == [0, 1, 2]
    assert all(a.label == 0 for a in s.atoms)


def test_make_sample_prescribed_labels():
    s = make_sample(labeled_dlo(2), 4, [0, 1, 0, 1])
    assert [(a.value, a.label) for a in s.atoms] == [(0, 0), (1, 1), (2, 0), (3, 1)]


def test_make_sample_pure_set():
    s = make_sample(PURE_SET, 2)
    assert {a.value for a in s.atoms} == {0, 1}


def test_make_sample_default_labels_cover_alphabet():
    for k in (1, 2, 3):
        for n in range(k, k + 4):
            s = make_sample(labeled_dlo(k), n)
            assert {a.label for a in s.atoms} == set(range(k))


def test_make_sample_label_out_of_range():
    with pytest.raises(InvalidLabel):
        make_sample(labeled_dlo(2), 2, [0, 2])


def test_sample_rejects_duplicate_values():
    with pytest.raises(BaseMismatch):
        AtomSample(DLO, (Atom(Fraction(1)), Atom(Fraction(1))))


def test_order_type_examples():
    t = [Atom(Fraction(0)), Atom(Fraction(5)), Atom(Fraction(5))]
    u = [Atom(Fraction(-3)), Atom(Fraction(7)), Atom(Fraction(7))]
    assert order_type(t, DLO) == order_type(u, DLO)
    # the pattern x1 < x2 = x3 differs from x1 = x2 < x3
    v = [Atom(Fraction(0)), Atom(Fraction(0)), Atom(Fraction(5))]
    assert order_type(t, DLO) != order_type(v, DLO)


def test_order_type_pure_set_forgets_order():
    t = [Atom(Fraction(7)), Atom(Fraction(2))]
    u = [Atom(Fraction(1)), Atom(Fraction(9))]
    assert order_type(t, PURE_SET) == order_type(u, PURE_SET)
    assert order_type(t, DLO) != order_type(u, DLO)


def test_order_type_labels():
    base = labeled_dlo(2)
    t = [Atom(Fraction(0), 0), Atom(Fraction(1), 1)]
    u = [Atom(Fraction(3), 0), Atom(Fraction(9), 1)]
    w = [Atom(Fraction(3), 1), Atom(Fraction(9), 0)]
    assert order_type(t, base) == order_type(u, base)
    assert order_type(t, base) != order_type(w, base)


def test_order_type_monotone_invariance():
    rng = random.Random(1)
    base = labeled_dlo(3)
    for _ in range(50):
        tup = [Atom(Fraction(rng.randint(-20, 20)), rng.randrange(3)) for _ in range(4)]
        values = sorted({a.value for a in tup})
        # random strictly monotone image of the support
        image = {}
        prev = Fraction(rng.randint(-100, -50))
        for v in values:
            prev = prev + Fraction(rng.randint(1, 9), rng.randint(1, 4))
            image[v] = prev
        mapped = [Atom(image[a.value], a.label) for a in tup]
        assert order_type(tup, base) == order_type(mapped, base)


def test_insert_between_examples():
    assert insert_between(Atom(Fraction(0)), Atom(Fraction(1))).value == Fraction(1, 2)
    assert insert_between(Atom(Fraction(1, 2)), Atom(Fraction(1))).value == Fraction(3, 4)
    assert insert_between(Atom(Fraction(0)), Atom(Fraction(1, 3))).value == Fraction(1, 6)


def test_insert_between_properties():
    rng = random.Random(2)
    for _ in range(100):
        a = Fraction(rng.randint(-50, 50), rng.randint(1, 20))
        b = a + Fraction(rng.randint(1, 30), rng.randint(1, 20))
        mid = insert_between(Atom(a), Atom(b), label=0)
        assert a < mid.value < b
        from math import gcd

        assert gcd(abs(mid.value.numerator), mid.value.denominator) == 1


def test_insert_between_rejects_bad_interval():
    with pytest.raises(NotAnInterval):
        insert_between(Atom(Fraction(1)), Atom(Fraction(1)))
    with pytest.raises(NotAnInterval):
        insert_between(Atom(Fraction(2)), Atom(Fraction(1)))


def test_atom_string_roundtrip():
    for text in ("3", "-2", "3/4", "-7/2:1", "0:2"):
        a = Atom.parse(text)
        assert Atom.parse(str(a)) == a
    assert str(Atom(Fraction(3, 4), 1)) == "3/4:1"
    assert str(Atom(Fraction(5))) == "5"
