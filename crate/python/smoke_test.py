"""Smoke test for the nilamalgam extension module.

Build and install first:
    pip install --no-build-isolation -e crates/python
"""

import json
import sys

import nilamalgam as nm


def main() -> int:
    h = nm.PcGroup("group H { gens: a, b, c; rels: [b,a] = c }")
    assert h.normal_form("b*a") == "a^1*b^1*c^1"
    assert h.exponents("[a,b]^3") == [0, 0, -3]
    assert h.hirsch_length == 3 and h.nilpotency_class == 2
    assert h.abelianization() == "Z^2"

    za = nm.PcGroup("group Za { gens: a; rels: }")
    zb = nm.PcGroup("group Zb { gens: b; rels: }")
    g = nm.Amalgam.from_identification("G", za, zb, [("a^2", "b^3")])
    assert g.normal_form("a^2*b^-3") == "1"
    assert g.syllable_length("a*b*a") == 3
    assert g.abelianization() == "Z"

    assert nm.smith_form([[2, 4], [6, 8]]) == [2, 4]
    assert nm.hermite_form([[0, 2], [3, 1]]) == [[3, 1], [0, 2]]

    ws = nm.Workspace.load("builtin:nil-neg")
    trap = ws.verify("counterexample")
    assert trap.verified and trap.kind == "trap"
    trap.recheck(ws)
    polyrs = ws.verify("polyrs", "G")
    assert not polyrs.verified
    assert json.loads(polyrs.to_json())["report"]["compatibility"]["first_failure"] == 1
    unknown = ws.separate("G", "a", max_derived_length=4)
    assert not unknown.verified and unknown.conclusion == "unknown"

    tower = nm.Workspace.load("builtin:heisenberg").verify("polyrs", "D")
    assert tower.verified and tower.chain_length == 2
    again = nm.Certificate.from_json(tower.to_json())
    again.recheck(nm.Workspace.load("builtin:heisenberg"))

    try:
        h.normal_form("a*d")
    except nm.NilamalgamError as e:
        assert "undeclared generator" in str(e)
    else:
        raise AssertionError("expected an error for an undeclared generator")

    print("smoke test ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
