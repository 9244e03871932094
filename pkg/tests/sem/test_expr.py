"""Tests for mechanism expressions."""

import numpy as np
import pytest

from otcausal.errors import ConfigError
from otcausal.sem import Mechanism

X1 = np.array([1.0, 2.0, 4.0])
X2 = np.array([-1.0, 0.5, 3.0])


@pytest.mark.parametrize(
    "text,expected",
    [
        ("0", 0.0),
        ("X1 + 2 * X2", X1 + 2 * X2),
        ("(X1 - X2) / 2", (X1 - X2) / 2),
        ("-X1", -X1),
        ("POWER(X1, 2) - 0.5 * X1 * X2", X1**2 - 0.5 * X1 * X2),
        ("X1 ^ 3", X1**3),
        ("LN(X1)", np.log(X1)),
        ("LOG(2, X1)", np.log2(X1)),
        ("EXP(X2)", np.exp(X2)),
        ("SQRT(X1)", np.sqrt(X1)),
        ("ABS(X2)", np.abs(X2)),
        ("(POWER(X2, 3) + LN(ABS(X2) * POWER(X1, 2))) / 15", (X2**3 + np.log(np.abs(X2) * X1**2)) / 15),
    ],
)
def test_evaluate(text, expected):
    mechanism = Mechanism.parse(text)
    np.testing.assert_allclose(mechanism.evaluate({"X1": X1, "X2": X2}), expected)


def test_identifiers():
    mechanism = Mechanism.parse("X1 * U + X3")
    assert mechanism.variables() == {0, 2}
    assert mechanism.uses_noise()
    assert not mechanism.uses_core()
    assert Mechanism.parse("POWER(V, 3)").uses_core()
    assert str(mechanism) == "X1 * U + X3"


def test_equality_ignores_tree():
    assert Mechanism.parse("X1 + 1") == Mechanism.parse(" X1 + 1 ")


@pytest.mark.parametrize(
    "text,message",
    [
        ("(X1", "cannot parse"),
        ("Y + 1", "unknown identifier"),
        ("SIN(X1)", "unsupported function"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(ConfigError, match=message):
        Mechanism.parse(text)


def test_unbound_identifier():
    with pytest.raises(ConfigError, match="not bound"):
        Mechanism.parse("X1 + X2").evaluate({"X1": X1})


def test_string_literal_is_rejected():
    with pytest.raises(ConfigError, match="string literal"):
        Mechanism.parse("'a'").evaluate({})
