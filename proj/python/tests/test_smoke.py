import math

import pytest

import dmcvm

TOL = 1e-9
HAD = "(defpattern had () (?i ?o) (?i) (?o) ((E ?i ?o) (M ?i 0) (X ?o (s ?i))))"


def matches(amps, target):
    k = max(range(len(target)), key=lambda i: abs(target[i]))
    if abs(amps[k]) < 1e-12:
        return False
    phase = amps[k] / target[k]
    if abs(abs(phase) - 1) > TOL:
        return False
    return all(abs(a - phase * t) < TOL for a, t in zip(amps, target))


def test_list_builtins():
    names = [b["name"] for b in dmcvm.list_builtins()]
    assert names[:4] == ["H", "J", "CZ", "CX"]
    assert "SC-ES" in names
    kinds = {b["name"]: b["kind"] for b in dmcvm.list_builtins()}
    assert kinds["H"] == "pattern" and kinds["TP"] == "network"


def test_hadamard_branches():
    branches = dmcvm.run("builtin:H", inputs={"?i": "0"})
    assert len(branches) == 2
    r = 1 / math.sqrt(2)
    for b in branches:
        assert abs(b["probability"] - 0.5) < TOL
        assert matches(b["state"]["amplitudes"], [r, r])


def test_teleport_network():
    alpha, beta = 0.6, 0.8j
    branches = dmcvm.run("builtin:TP", inputs={"?q1": (alpha, beta)})
    assert len(branches) == 4
    assert abs(sum(b["probability"] for b in branches) - 1.0) < TOL
    for b in branches:
        assert matches(b["state"]["amplitudes"], [alpha, beta])
        assert list(b["ownership"].values()) == ["B"]


def test_definition_text_and_validate():
    assert dmcvm.validate(HAD) == []
    branches = dmcvm.run("had", inputs={"?i": "1"}, text=HAD)
    assert len(branches) == 2
    bad = HAD.replace("(X ?o (s ?i))", "")  # output never corrected is fine,
    assert dmcvm.validate(bad) == []  # but measuring an output is not:
    worse = "(defpattern bad () (?i ?o) (?i) (?o) ((E ?i ?o) (M ?o 0)))"
    assert any("output" in v for v in dmcvm.validate(worse))


def test_sampling_reproducible():
    one = dmcvm.run("builtin:TP", inputs={"?q1": "+"}, mode="sample", seed=7)
    two = dmcvm.run("builtin:TP", inputs={"?q1": "+"}, mode="sample", seed=7)
    assert len(one) == 1
    assert one[0]["outcomes"] == two[0]["outcomes"]
    assert one[0]["state"]["display"] == two[0]["state"]["display"]


def test_ghz_state():
    branches = dmcvm.run("builtin:GHZ(3)")
    r = 1 / math.sqrt(2)
    target = [r, 0, 0, 0, 0, 0, 0, r]
    for b in branches:
        assert matches(b["state"]["amplitudes"], target)


def test_errors_translate():
    with pytest.raises(dmcvm.DmcError):
        dmcvm.run("builtin:NOPE")
    with pytest.raises(dmcvm.DmcError, match="seed"):
        dmcvm.run("builtin:H", inputs={"?i": "0"}, mode="sample")


def test_compile_and_input_names():
    text = dmcvm.compile("builtin:H")
    assert text.startswith("((?i ?o)")
    assert dmcvm.input_names("builtin:H") == ["?i"]
    assert "A.?q1" in dmcvm.input_names("builtin:TP")
