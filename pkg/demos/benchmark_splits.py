# Build labeled/unlabeled class splits of controlled semantic similarity
# from a two-level class hierarchy.
#
# Splitting the superclasses into two halves gives a high-similarity pair
# (L1, U1) and a low-similarity pair (L2, U1): unlabeled classes in U1 share
# superclasses with L1 but not with L2. The mixed set L1.5 interpolates.

import json

from tleak import SplitConfig, build_splits, load_fixture_hierarchy, validate_manifest

h = load_fixture_hierarchy("entity30")
print("hierarchy:", len(h.superclasses), "superclasses,",
      sum(len(s.subclasses) for s in h.superclasses), "classes")

cfg = SplitConfig(
    half_size=15,
    labeled_per_super=6,
    unlabeled_per_super=2,
    make_mixed=True,
)
manifest = build_splits(h, cfg)

for name, classes in manifest.labeled_sets.items():
    print(f"{name}: {len(classes)} labeled classes")
for name, classes in manifest.unlabeled_sets.items():
    print(f"{name}: {len(classes)} unlabeled classes")

report = validate_manifest(manifest, h)
print("manifest valid:", report.ok)

l1 = set(manifest.labeled_sets["L1"])
l2 = set(manifest.labeled_sets["L2"])
mixed = set(manifest.labeled_sets["L1.5"])
print("L1.5 draws", len(mixed & l1), "classes from L1 and",
      len(mixed & l2), "from L2")

# a seeded selection shuffles which subclasses play the labeled role while
# keeping the manifest reproducible for a fixed seed
seeded = build_splits(
    h,
    SplitConfig(
        half_size=15,
        labeled_per_super=6,
        unlabeled_per_super=2,
        make_mixed=False,
        selection="seeded",
        seed=7,
    ),
)
print()
print("seeded L1 starts with:", seeded.labeled_sets["L1"][:4])

# manifests serialize to stable JSON with provenance for reproduction
doc = json.loads(manifest.to_json())
print("schema:", doc["schema"])
print("hierarchy digest:", doc["provenance"]["hierarchy_sha256"][:16], "...")

# the smaller bundled hierarchy works the same way
h100 = load_fixture_hierarchy("cifar100")
m100 = build_splits(
    h100,
    SplitConfig(half_size=10, labeled_per_super=4, unlabeled_per_super=1, make_mixed=False),
)
print()
print("cifar100 L1:", len(m100.labeled_sets["L1"]),
      "U1:", len(m100.unlabeled_sets["U1"]))
