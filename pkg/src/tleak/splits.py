"""Labeled/unlabeled class-split manifests from a two-level class hierarchy.

Given a hierarchy of superclasses each holding an ordered list of subclasses,
build_splits produces two matched pairs of class sets: the first half_size
superclasses yield (L1, U1) and the next half_size yield (L2, U2), with
labeled_per_super subclasses of each superclass labeled and the following
unlabeled_per_super unlabeled. Because L1/U1 share superclasses they are
semantically close, while L1 is far from U2 (and vice versa). An optional
mixed set L1.5 sits in between: it takes the first ceil(|L1| / 2) classes of
L1 and the last floor(|L2| / 2) classes of L2, which for an even half_size is
exactly the first half of L1's superclass blocks plus the last half of L2's.

Manifests serialize to canonical JSON (schema "ddb_manifest_v1") that is
byte-identical across runs for identical inputs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import InputError

MANIFEST_SCHEMA = "ddb_manifest_v1"
POSITIONAL = "positional"
SEEDED = "seeded"

FIXTURES = ("cifar100", "entity30")


@dataclass(frozen=True)
class Superclass:
    name: str
    subclasses: tuple[str, ...]


@dataclass(frozen=True)
class ClassHierarchy:
    superclasses: tuple[Superclass, ...]

    def __post_init__(self):
        supers = tuple(
            s if isinstance(s, Superclass) else Superclass(s[0], tuple(s[1]))
            for s in self.superclasses
        )
        if not supers:
            raise InputError("hierarchy has no superclasses")
        names = [s.name for s in supers]
        if len(set(names)) != len(names):
            raise InputError("superclass names must be unique")
        all_subs: list[str] = []
        for s in supers:
            if not s.subclasses:
                raise InputError(f"superclass {s.name!r} has no subclasses")
            all_subs.extend(s.subclasses)
        if len(set(all_subs)) != len(all_subs):
            dupe = next(x for x in all_subs if all_subs.count(x) > 1)
            raise InputError(f"subclass names must be globally unique ({dupe!r} repeats)")
        object.__setattr__(self, "superclasses", supers)

    def to_json_dict(self) -> dict:
        return {
            "superclasses": [
                {"name": s.name, "subclasses": list(s.subclasses)}
                for s in self.superclasses
            ]
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ClassHierarchy":
        if not isinstance(obj, dict) or "superclasses" not in obj:
            raise InputError("hierarchy JSON needs a 'superclasses' list")
        supers = []
        for entry in obj["superclasses"]:
            try:
                supers.append(Superclass(str(entry["name"]),
                                         tuple(str(x) for x in entry["subclasses"])))
            except (TypeError, KeyError) as exc:
                raise InputError(f"malformed superclass entry: {entry!r}") from exc
        return cls(superclasses=tuple(supers))

    def digest(self) -> str:
        blob = json.dumps(self.to_json_dict(), sort_keys=True,
                          separators=(",", ":")).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    def all_classes(self) -> frozenset[str]:
        return frozenset(
            sub for s in self.superclasses for sub in s.subclasses
        )


@dataclass(frozen=True)
class SplitConfig:
    half_size: int
    labeled_per_super: int
    unlabeled_per_super: int
    make_mixed: bool = False
    seed: int = 0
    selection: str = POSITIONAL

    def __post_init__(self):
        if self.half_size < 1:
            raise InputError(f"half_size must be >= 1, got {self.half_size}")
        if self.labeled_per_super < 1:
            raise InputError(
                f"labeled_per_super must be >= 1, got {self.labeled_per_super}"
            )
        if self.unlabeled_per_super < 0:
            raise InputError(
                f"unlabeled_per_super must be >= 0, got {self.unlabeled_per_super}"
            )
        if self.selection not in (POSITIONAL, SEEDED):
            raise InputError(f"unknown selection mode {self.selection!r}")

    def to_json_dict(self) -> dict:
        return {
            "half_size": self.half_size,
            "labeled_per_super": self.labeled_per_super,
            "unlabeled_per_super": self.unlabeled_per_super,
            "make_mixed": self.make_mixed,
            "seed": self.seed,
            "selection": self.selection,
        }


@dataclass(frozen=True)
class SplitManifest:
    labeled_sets: dict[str, tuple[str, ...]]
    unlabeled_sets: dict[str, tuple[str, ...]]
    provenance: dict

    def to_json_dict(self) -> dict:
        return {
            "schema": MANIFEST_SCHEMA,
            "labeled_sets": {k: list(v) for k, v in sorted(self.labeled_sets.items())},
            "unlabeled_sets": {k: list(v) for k, v in sorted(self.unlabeled_sets.items())},
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    @classmethod
    def from_json_dict(cls, obj: dict) -> "SplitManifest":
        if not isinstance(obj, dict):
            raise InputError("manifest must be a JSON object")
        try:
            labeled = {k: tuple(v) for k, v in obj["labeled_sets"].items()}
            unlabeled = {k: tuple(v) for k, v in obj["unlabeled_sets"].items()}
        except (KeyError, TypeError, AttributeError) as exc:
            raise InputError("manifest needs labeled_sets and unlabeled_sets") from exc
        return cls(labeled_sets=labeled, unlabeled_sets=unlabeled,
                   provenance=obj.get("provenance", {}))


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]


_MIXED_RULE = (
    "L1.5 = first ceil(|L1|/2) classes of L1 + last floor(|L2|/2) classes of L2"
)


def build_splits(h: ClassHierarchy, cfg: SplitConfig) -> SplitManifest:
    """Construct the (L1, U1), (L2, U2) and optional L1.5 class sets.

    Selection is positional by default (the first labeled_per_super
    subclasses of each superclass are labeled, the next unlabeled_per_super
    unlabeled); seeded selection shuffles each superclass's subclass list
    first with a generator seeded by cfg.seed.
    """
    total = len(h.superclasses)
    if 2 * cfg.half_size > total:
        raise InputError(
            f"2 * half_size = {2 * cfg.half_size} exceeds the "
            f"{total} superclasses available"
        )
    need = cfg.labeled_per_super + cfg.unlabeled_per_super
    used = h.superclasses[: 2 * cfg.half_size]
    for s in used:
        if need > len(s.subclasses):
            raise InputError(
                f"superclass {s.name!r} has {len(s.subclasses)} subclasses, "
                f"config needs labeled + unlabeled = {need}"
            )
    rng = np.random.default_rng(cfg.seed) if cfg.selection == SEEDED else None

    def pick(s: Superclass) -> tuple[list[str], list[str]]:
        subs = list(s.subclasses)
        if rng is not None:
            order = rng.permutation(len(subs))
            subs = [subs[i] for i in order]
        return (subs[: cfg.labeled_per_super],
                subs[cfg.labeled_per_super: need])

    l1: list[str] = []
    u1: list[str] = []
    l2: list[str] = []
    u2: list[str] = []
    for i, s in enumerate(used):
        lab, unlab = pick(s)
        (l1 if i < cfg.half_size else l2).extend(lab)
        (u1 if i < cfg.half_size else u2).extend(unlab)

    labeled = {"L1": tuple(l1), "L2": tuple(l2)}
    unlabeled = {"U1": tuple(u1), "U2": tuple(u2)}
    provenance = {
        "hierarchy_sha256": h.digest(),
        "config": cfg.to_json_dict(),
        "seed": cfg.seed,
    }
    if cfg.make_mixed:
        take_l1 = (len(l1) + 1) // 2
        take_l2 = len(l1) - take_l1
        labeled["L1.5"] = tuple(l1[:take_l1] + l2[len(l2) - take_l2:])
        provenance["mixed_rule"] = _MIXED_RULE
    return SplitManifest(labeled_sets=labeled, unlabeled_sets=unlabeled,
                         provenance=provenance)


def validate_manifest(manifest: SplitManifest, h: ClassHierarchy) -> ValidationReport:
    """Check manifest invariants against a hierarchy; violations are data.

    Checks: classes exist in the hierarchy, no duplicates within a set,
    every labeled set disjoint from every unlabeled set, L1/L2 disjoint,
    U1/U2 disjoint, and the composition rule for L1.5 when present.
    """
    violations: list[str] = []
    known = h.all_classes()
    named_sets = list(manifest.labeled_sets.items()) + \
        list(manifest.unlabeled_sets.items())
    for name, classes in named_sets:
        seen = set()
        for cls_name in classes:
            if cls_name not in known:
                violations.append(f"unknown class: {cls_name!r} in {name}")
            if cls_name in seen:
                violations.append(f"duplicate class {cls_name!r} in {name}")
            seen.add(cls_name)
    for lname, lclasses in manifest.labeled_sets.items():
        for uname, uclasses in manifest.unlabeled_sets.items():
            overlap = sorted(set(lclasses) & set(uclasses))
            for cls_name in overlap:
                violations.append(
                    f"labeled/unlabeled overlap: {cls_name!r} in {lname} and {uname}"
                )
    for a, b in (("L1", "L2"),):
        if a in manifest.labeled_sets and b in manifest.labeled_sets:
            for cls_name in sorted(set(manifest.labeled_sets[a]) &
                                   set(manifest.labeled_sets[b])):
                violations.append(f"overlap between {a} and {b}: {cls_name!r}")
    if "U1" in manifest.unlabeled_sets and "U2" in manifest.unlabeled_sets:
        for cls_name in sorted(set(manifest.unlabeled_sets["U1"]) &
                               set(manifest.unlabeled_sets["U2"])):
            violations.append(f"overlap between U1 and U2: {cls_name!r}")
    mixed = manifest.labeled_sets.get("L1.5")
    if mixed is not None and "L1" in manifest.labeled_sets \
            and "L2" in manifest.labeled_sets:
        s1 = set(manifest.labeled_sets["L1"])
        s2 = set(manifest.labeled_sets["L2"])
        sm = set(mixed)
        if len(mixed) != len(manifest.labeled_sets["L1"]):
            violations.append(
                f"L1.5 size {len(mixed)} != L1 size "
                f"{len(manifest.labeled_sets['L1'])}"
            )
        if not sm <= (s1 | s2):
            extra = sorted(sm - (s1 | s2))
            violations.append(f"L1.5 contains classes outside L1 and L2: {extra}")
        want_l1 = (len(mixed) + 1) // 2
        if len(sm & s1) != want_l1 or len(sm & s2) != len(mixed) - want_l1:
            violations.append(
                f"L1.5 must take {want_l1} classes from L1 and "
                f"{len(mixed) - want_l1} from L2, got {len(sm & s1)} and {len(sm & s2)}"
            )
    return ValidationReport(ok=not violations, violations=tuple(violations))


def load_fixture_hierarchy(name: str) -> ClassHierarchy:
    """Load one of the bundled hierarchies ("cifar100" or "entity30").

    cifar100 carries the concrete 20 x 5 class names (4 labeled + 1
    unlabeled per superclass under positional selection). entity30 is
    shape-exact (30 superclasses x 8 subclasses, 6 + 2 under the standard
    config) but uses positional placeholder names.
    """
    if name not in FIXTURES:
        raise InputError(f"unknown fixture {name!r}, expected one of {FIXTURES}")
    text = resources.files("tleak.data").joinpath(f"{name}.json").read_text("utf-8")
    return ClassHierarchy.from_json_dict(json.loads(text))
