# The same workflow through files and the command line. Embeddings travel
# either as .tlk (compact binary: magic, row count, dim, float64 rows,
# optional int32 labels) or as .csv with an optional trailing label column.

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from tleak import EmbeddingSet, LabelVector
from tleak.io import load_embeddings, save_csv, save_tlk

workdir = Path(tempfile.mkdtemp(prefix="tleak-demo-"))
rng = np.random.default_rng(0)

X = np.concatenate([rng.standard_normal((40, 4)), rng.standard_normal((40, 4)) + 2.0])
labels = LabelVector(labels=np.repeat(np.arange(2), 40), num_classes=2)
data = EmbeddingSet(X)

tlk = workdir / "embeddings.tlk"
csv = workdir / "embeddings.csv"
save_tlk(tlk, data, labels)
save_csv(csv, data, labels)
print("tlk bytes:", tlk.stat().st_size, "csv bytes:", csv.stat().st_size)

# both round-trip; the binary one is bit-exact by construction
back, back_labels = load_embeddings(tlk)
print("round trip exact:", np.array_equal(back.values, X))


def tleak_cli(*args):
    cmd = [sys.executable, "-m", "tleak.cli", *args]
    proc = subprocess.run(cmd, capture_output=True, text=True, check=True)
    return proc.stdout.strip()


# compute a leakage report; --no-timestamp makes the file byte-reproducible
out = workdir / "report.json"
value = tleak_cli(
    "compute", "--data", str(tlk), "--out", str(out), "--no-timestamp"
)
print("leakage printed by the CLI:", value)

doc = json.loads(out.read_text())
print("report schema:", doc["schema"])
print("kernel:", doc["kernel"])
print("config echoed for reproduction:", sorted(doc["config"]))

# pseudo-label variant and a quick accuracy check, all file-driven
print("pseudo leakage:", tleak_cli("pseudo", "--data", str(tlk), "--k", "2"))

pred = workdir / "pred.csv"
pred.write_text("label\n" + "\n".join(str(v) for v in labels.labels[::-1]) + "\n")
truth = workdir / "true.csv"
truth.write_text("label\n" + "\n".join(str(v) for v in labels.labels) + "\n")
print("accuracy:", tleak_cli("acc", "--true", str(truth), "--pred", str(pred)))

# synthetic data generation straight to a file
synth = workdir / "synth.tlk"
tleak_cli(
    "synth", "--classes", "3", "--dim", "4", "--sep", "2.0",
    "--per-class", "50", "--seed", "1", "--out", str(synth),
)
gen, gen_labels = load_embeddings(synth)
print("generated:", gen.values.shape, "with labels:", gen_labels is not None)

print("working directory kept at", workdir)
