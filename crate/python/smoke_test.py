#!/usr/bin/env python3
"""Smoke test for the aritoric_py extension module.

Builds nothing itself: run `cargo build -p aritoric-py` first, then
`python3 python/smoke_test.py`. The script locates the compiled cdylib under
target/, exposes it as an importable module, and exercises the main entry
points against known values.
"""

import json
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def import_extension():
    names = ["libaritoric_py.so", "aritoric_py.so", "libaritoric_py.dylib"]
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in names
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("extension not found; run `cargo build -p aritoric-py` first")
    stage = pathlib.Path(tempfile.mkdtemp(prefix="aritoric-py-"))
    shutil.copy2(built, stage / "aritoric_py.so")
    sys.path.insert(0, str(stage))
    import aritoric_py

    return aritoric_py


def main():
    m = import_extension()

    # fan construction and invariants
    fan = m.build_an_fan(3)
    assert fan.rank == 3
    assert len(fan.rays) == 14
    assert len(fan.max_cones) == 24
    assert fan.is_smooth() and fan.is_complete()
    assert fan.aut_order() == 48
    round_trip = m.Fan.from_json(fan.to_json())
    assert round_trip.rays == fan.rays
    print("fan: OK")

    # cohomology on P^1: h^*(O(d)) for d = 3 and d = -2
    p1 = m.build_an_fan(1)
    assert p1.cohomology([3, 0]) == [4, 0]
    assert p1.cohomology([-2, 0]) == [0, 1]
    dp6 = m.build_an_fan(2)
    assert dp6.cohomology([1] * 6) == [7, 0, 0]
    print("cohomology: OK")

    # collection verification on the del Pezzo surface
    fan2, coll2 = m.build_ct_collection(2)
    assert len(coll2) == 6
    report = coll2.verify()
    assert report["passed"] and report["numerically_full"]
    assert coll2.ext_dims(coll2.labels[0], coll2.labels[0]) == [1, 0, 0]
    table = m.collection_ext_table(fan2, coll2)
    assert len(table) == 6 and table[0][0] == [1, 0, 0]
    print("collection: OK")

    # Sha of norm-one biquadratic tori
    live = m.sha_biquadratic(5, 29)
    assert not live["trivial"] and live["torsion"] == ["2"]
    assert live["method"] == "all_cyclic_decomposition"
    assert m.sha_biquadratic(5, 13)["trivial"]
    print("sha: OK")

    # descent, rationality, and the certificate on the bundled action
    fan3, coll3 = m.build_ct_collection(3)
    data = ROOT / "crates" / "cli" / "data"
    action_text = (data / "an3.klein-5-29.action.json").read_text()
    action = m.GaloisAction.from_json(action_text, fan3)
    assert action.group_order == 4
    descent = action.descend(fan3, coll3)
    assert descent["all_vanished"]
    assert sum(len(o["members"]) for o in descent["orbits"]) == 24
    rat = action.rationality(fan3)
    assert not rat["rational"] and rat["nontrivial_elements"]
    cert = action.certificate(fan3, coll3)
    assert cert["certified"] and not cert["zhe_trivial"]
    assert len(cert["statements"]) == 4

    dead_text = json.loads(action_text)
    dead_text["field_label"] = {"biquadratic": [5, 13]}
    dead = m.GaloisAction.from_json(json.dumps(dead_text), fan3)
    cert = dead.certificate(fan3, coll3)
    assert not cert["certified"] and cert["zhe_trivial"]
    assert cert["reason"]
    print("descent + certificate: OK")

    print("smoke test passed")


if __name__ == "__main__":
    main()
