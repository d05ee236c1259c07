"""Hierarchical benchmark splits: construction, validation, serialization."""

import json

import numpy as np
import pytest

from tleak import (
    ClassHierarchy,
    SplitConfig,
    SplitManifest,
    Superclass,
    build_splits,
    load_fixture_hierarchy,
    validate_manifest,
)
from tleak.errors import InputError


def _toy_hierarchy(n_super=4, n_sub=3):
    supers = tuple(
        Superclass(
            name=f"s{i}",
            subclasses=tuple(f"s{i}_c{j}" for j in range(n_sub)),
        )
        for i in range(n_super)
    )
    return ClassHierarchy(superclasses=supers)


def test_fixture_sizes_30x8():
    h = load_fixture_hierarchy("entity30")
    assert len(h.superclasses) == 30
    assert all(len(s.subclasses) == 8 for s in h.superclasses)
    cfg = SplitConfig(half_size=15, labeled_per_super=6, unlabeled_per_super=2, make_mixed=True)
    manifest = build_splits(h, cfg)
    assert len(manifest.labeled_sets["L1"]) == 90
    assert len(manifest.labeled_sets["L2"]) == 90
    assert len(manifest.labeled_sets["L1.5"]) == 90
    assert len(manifest.unlabeled_sets["U1"]) == 30
    assert len(manifest.unlabeled_sets["U2"]) == 30
    report = validate_manifest(manifest, h)
    assert report.ok, report.violations


def test_fixture_sizes_20x5():
    h = load_fixture_hierarchy("cifar100")
    assert len(h.superclasses) == 20
    assert sum(len(s.subclasses) for s in h.superclasses) == 100
    cfg = SplitConfig(half_size=10, labeled_per_super=4, unlabeled_per_super=1, make_mixed=False)
    manifest = build_splits(h, cfg)
    assert len(manifest.labeled_sets["L1"]) == 40
    assert len(manifest.unlabeled_sets["U1"]) == 10
    assert "L1.5" not in manifest.labeled_sets
    assert validate_manifest(manifest, h).ok


def test_unknown_fixture():
    with pytest.raises(InputError):
        load_fixture_hierarchy("imagenet")


def test_minimal_split():
    h = _toy_hierarchy(n_super=2, n_sub=2)
    cfg = SplitConfig(half_size=1, labeled_per_super=1, unlabeled_per_super=1, make_mixed=True)
    manifest = build_splits(h, cfg)
    for name in ("L1", "L2", "L1.5"):
        assert len(manifest.labeled_sets[name]) == 1
    for name in ("U1", "U2"):
        assert len(manifest.unlabeled_sets[name]) == 1
    assert validate_manifest(manifest, h).ok


def test_halves_are_disjoint():
    h = _toy_hierarchy()
    cfg = SplitConfig(half_size=2, labeled_per_super=2, unlabeled_per_super=1, make_mixed=True)
    m = build_splits(h, cfg)
    l1, l2 = set(m.labeled_sets["L1"]), set(m.labeled_sets["L2"])
    u1, u2 = set(m.unlabeled_sets["U1"]), set(m.unlabeled_sets["U2"])
    assert not l1 & l2
    assert not u1 & u2
    assert not (l1 | l2) & (u1 | u2)


def test_mixed_set_takes_half_from_each_side():
    h = _toy_hierarchy()
    cfg = SplitConfig(half_size=2, labeled_per_super=2, unlabeled_per_super=1, make_mixed=True)
    m = build_splits(h, cfg)
    l1, l2 = m.labeled_sets["L1"], m.labeled_sets["L2"]
    mixed = m.labeled_sets["L1.5"]
    assert len(mixed) == len(l1)
    take = (len(l1) + 1) // 2
    assert mixed[:take] == l1[:take]
    assert mixed[take:] == l2[len(l2) - (len(l1) - take):]


def test_mixed_set_odd_half():
    # 6 supers, half_size 3, 1 labeled class each: |L1| = 3, so the mixed
    # set takes 2 classes from L1 and 1 from the tail of L2.
    h = _toy_hierarchy(n_super=6, n_sub=2)
    cfg = SplitConfig(half_size=3, labeled_per_super=1, unlabeled_per_super=1, make_mixed=True)
    m = build_splits(h, cfg)
    mixed = m.labeled_sets["L1.5"]
    l1, l2 = m.labeled_sets["L1"], m.labeled_sets["L2"]
    assert len(mixed) == 3
    assert mixed[:2] == l1[:2]
    assert mixed[2:] == l2[-1:]
    assert validate_manifest(m, h).ok


def test_positional_selection_is_stable():
    h = _toy_hierarchy()
    cfg = SplitConfig(half_size=2, labeled_per_super=2, unlabeled_per_super=1, make_mixed=True)
    a = build_splits(h, cfg)
    b = build_splits(h, cfg)
    assert a.to_json() == b.to_json()
    # positional selection takes subclasses in hierarchy order
    assert a.labeled_sets["L1"] == ("s0_c0", "s0_c1", "s1_c0", "s1_c1")
    assert a.unlabeled_sets["U1"] == ("s0_c2", "s1_c2")


def test_seeded_selection_is_deterministic_and_conserving():
    h = _toy_hierarchy()
    base = dict(half_size=2, labeled_per_super=2, unlabeled_per_super=1, make_mixed=False)
    a = build_splits(h, SplitConfig(**base, selection="seeded", seed=5))
    b = build_splits(h, SplitConfig(**base, selection="seeded", seed=5))
    assert a.to_json() == b.to_json()
    positional = build_splits(h, SplitConfig(**base))
    # same classes per superclass overall, possibly different roles
    for manifest in (a,):
        chosen = set(manifest.labeled_sets["L1"]) | set(manifest.unlabeled_sets["U1"])
        reference = set(positional.labeled_sets["L1"]) | set(positional.unlabeled_sets["U1"])
        assert chosen == reference
    assert validate_manifest(a, h).ok


def test_infeasible_configs_are_rejected():
    h = _toy_hierarchy(n_super=4, n_sub=3)
    with pytest.raises(InputError):  # 2*3 > 4 superclasses
        build_splits(h, SplitConfig(half_size=3, labeled_per_super=1, unlabeled_per_super=0, make_mixed=False))
    with pytest.raises(InputError, match="s0"):  # 3+1 > 3 subclasses
        build_splits(h, SplitConfig(half_size=2, labeled_per_super=3, unlabeled_per_super=1, make_mixed=False))


def test_config_validation():
    with pytest.raises(InputError):
        SplitConfig(half_size=0, labeled_per_super=1, unlabeled_per_super=1, make_mixed=False)
    with pytest.raises(InputError):
        SplitConfig(half_size=1, labeled_per_super=0, unlabeled_per_super=1, make_mixed=False)
    with pytest.raises(InputError):
        SplitConfig(half_size=1, labeled_per_super=1, unlabeled_per_super=-1, make_mixed=False)
    with pytest.raises(InputError):
        SplitConfig(half_size=1, labeled_per_super=1, unlabeled_per_super=1, make_mixed=False, selection="random")


def test_hierarchy_validation():
    with pytest.raises(InputError):  # duplicate superclass names
        ClassHierarchy(superclasses=(Superclass("a", ("x",)), Superclass("a", ("y",))))
    with pytest.raises(InputError):  # duplicate subclass across supers
        ClassHierarchy(superclasses=(Superclass("a", ("x",)), Superclass("b", ("x",))))
    with pytest.raises(InputError):  # empty superclass
        ClassHierarchy(superclasses=(Superclass("a", ()),))
    with pytest.raises(InputError):  # no superclasses at all
        ClassHierarchy(superclasses=())


def test_hierarchy_json_round_trip_and_digest():
    h = _toy_hierarchy()
    again = ClassHierarchy.from_json_dict(h.to_json_dict())
    assert again == h
    assert again.digest() == h.digest()
    assert len(h.digest()) == 64


def test_manifest_json_round_trip():
    h = _toy_hierarchy()
    cfg = SplitConfig(half_size=2, labeled_per_super=2, unlabeled_per_super=1, make_mixed=True)
    m = build_splits(h, cfg)
    text = m.to_json()
    doc = json.loads(text)
    assert doc["schema"] == "ddb_manifest_v1"
    again = SplitManifest.from_json_dict(doc)
    assert again.to_json() == text


def test_provenance_fields():
    h = _toy_hierarchy()
    cfg = SplitConfig(half_size=2, labeled_per_super=2, unlabeled_per_super=1, make_mixed=True, selection="seeded", seed=11)
    m = build_splits(h, cfg)
    prov = m.provenance
    assert prov["hierarchy_sha256"] == h.digest()
    assert prov["seed"] == 11
    assert prov["config"]["half_size"] == 2
    assert "mixed_rule" in prov


def test_validator_catches_violations():
    h = _toy_hierarchy()
    cfg = SplitConfig(half_size=2, labeled_per_super=2, unlabeled_per_super=1, make_mixed=True)
    good = build_splits(h, cfg)

    # overlap between the labeled halves
    bad = SplitManifest(
        labeled_sets={**good.labeled_sets, "L2": good.labeled_sets["L1"]},
        unlabeled_sets=good.unlabeled_sets,
        provenance=good.provenance,
    )
    report = validate_manifest(bad, h)
    assert not report.ok
    assert any("L1" in v and "L2" in v for v in report.violations)

    # a class that is not in the hierarchy
    bad = SplitManifest(
        labeled_sets={**good.labeled_sets, "L1": ("mystery", "s0_c1", "s1_c0", "s1_c1")},
        unlabeled_sets=good.unlabeled_sets,
        provenance=good.provenance,
    )
    report = validate_manifest(bad, h)
    assert not report.ok
    assert any("mystery" in v for v in report.violations)

    # duplicate within one set
    bad = SplitManifest(
        labeled_sets={**good.labeled_sets, "L1": ("s0_c0", "s0_c0", "s1_c0", "s1_c1")},
        unlabeled_sets=good.unlabeled_sets,
        provenance=good.provenance,
    )
    assert not validate_manifest(bad, h).ok

    # mixed set with the wrong composition
    bad = SplitManifest(
        labeled_sets={**good.labeled_sets, "L1.5": good.labeled_sets["L1"]},
        unlabeled_sets=good.unlabeled_sets,
        provenance=good.provenance,
    )
    assert not validate_manifest(bad, h).ok


def test_byte_stable_manifest_across_processes():
    # Serialization must not depend on dict iteration order or environment;
    # compare against a frozen digest of the toy build.
    import hashlib

    h = _toy_hierarchy()
    cfg = SplitConfig(half_size=2, labeled_per_super=2, unlabeled_per_super=1, make_mixed=True)
    text = build_splits(h, cfg).to_json()
    digest = hashlib.sha256(text.encode()).hexdigest()
    again = hashlib.sha256(build_splits(h, cfg).to_json().encode()).hexdigest()
    assert digest == again
