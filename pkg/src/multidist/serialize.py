"""Instance, classifier, and matrix file formats.

Instances and classifiers are JSON (numbers as decimal text, arrays in domain
index order). Matrices use a plain text format: first line n, then n lines of
n characters from {0,1}.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .hashing import CompactClassifier, PolyHash
from .instances import GenSpec
from .model import (
    DistributionFamily,
    Domain,
    ExplicitClassifier,
    Hypothesis,
    HypothesisClass,
    LabeledDistribution,
    RandomizedClassifier,
)
from .discrepancy import BinaryMatrix


def instance_to_dict(fam: DistributionFamily, cls: HypothesisClass,
                     gen_spec: GenSpec | None = None) -> dict:
    probs = fam.label_prob_matrix
    shared = bool(np.all(probs == probs[0]))
    doc: dict = {"domain_size": fam.domain.size}
    if shared:
        doc["shared_label_one_prob"] = probs[0].tolist()
        doc["distributions"] = [{"mass": m.mass.tolist()} for m in fam.members]
    else:
        doc["distributions"] = [
            {"mass": m.mass.tolist(), "label_one_prob": m.label_one_prob.tolist()}
            for m in fam.members
        ]
    doc["hypotheses"] = [h.labels.tolist() for h in cls.hypotheses]
    if cls.vc_dim is not None:
        doc["vc_dim"] = cls.vc_dim
    if gen_spec is not None:
        doc["gen_spec"] = dataclasses.asdict(gen_spec)
    return doc


def instance_from_dict(doc: dict) -> tuple[DistributionFamily, HypothesisClass, GenSpec | None]:
    n = int(doc["domain_size"])
    shared = doc.get("shared_label_one_prob")
    members = []
    for entry in doc["distributions"]:
        eta = entry.get("label_one_prob", shared)
        if eta is None:
            raise ValueError("distribution entry lacks label_one_prob and no shared vector given")
        members.append(LabeledDistribution(entry["mass"], eta))
    fam = DistributionFamily(Domain(n), tuple(members))
    hyps = tuple(Hypothesis(np.asarray(row, dtype=np.int8)) for row in doc["hypotheses"])
    cls = HypothesisClass(hyps, vc_dim=doc.get("vc_dim"))
    spec = GenSpec(**doc["gen_spec"]) if "gen_spec" in doc else None
    return fam, cls, spec


def save_instance(path, fam: DistributionFamily, cls: HypothesisClass,
                  gen_spec: GenSpec | None = None) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(fam, cls, gen_spec), indent=1))


def load_instance(path) -> tuple[DistributionFamily, HypothesisClass, GenSpec | None]:
    return instance_from_dict(json.loads(Path(path).read_text()))


def randomized_to_dict(f_rand: RandomizedClassifier) -> dict:
    return {
        "support_indices": list(f_rand.support),
        "weights": f_rand.weights.tolist(),
    }


def randomized_from_dict(doc: dict, cls: HypothesisClass) -> RandomizedClassifier:
    return RandomizedClassifier(cls, tuple(doc["support_indices"]), np.asarray(doc["weights"]))


def save_randomized(path, f_rand: RandomizedClassifier) -> None:
    Path(path).write_text(json.dumps(randomized_to_dict(f_rand), indent=1))


def load_randomized(path, cls: HypothesisClass) -> RandomizedClassifier:
    return randomized_from_dict(json.loads(Path(path).read_text()), cls)


def classifier_to_dict(clf) -> dict:
    if isinstance(clf, ExplicitClassifier):
        return {"kind": "explicit", "labels": clf.labels.tolist()}
    if isinstance(clf, CompactClassifier):
        return {
            "kind": "compact",
            "prime": clf.hash.prime,
            "degree_r": clf.hash.degree_r,
            "coefficients": list(clf.hash.coefficients),
            "range_size": clf.range_size,
            "domain_size": clf.domain_size,
            "t_table": sorted([int(x), int(l)] for x, l in clf.t_table.items()),
            "randomized": randomized_to_dict(clf.f_rand),
        }
    raise TypeError(f"cannot serialize classifier of type {type(clf).__name__}")


def classifier_from_dict(doc: dict, cls: HypothesisClass | None = None):
    kind = doc["kind"]
    if kind == "explicit":
        return ExplicitClassifier(np.asarray(doc["labels"], dtype=np.int8))
    if kind == "compact":
        if cls is None:
            raise ValueError("loading a compact classifier needs the hypothesis class")
        coeffs = doc["coefficients"]
        if len(coeffs) != doc["degree_r"]:
            raise ValueError("degree_r does not match the coefficient count")
        q = PolyHash(int(doc["prime"]), tuple(int(c) for c in coeffs))
        f_rand = randomized_from_dict(doc["randomized"], cls)
        table = {int(x): int(l) for x, l in doc["t_table"]}
        return CompactClassifier(q, table, f_rand, int(doc["domain_size"]), int(doc["range_size"]))
    raise ValueError(f"unknown classifier kind {kind!r}")


def save_classifier(path, clf) -> None:
    Path(path).write_text(json.dumps(classifier_to_dict(clf), indent=1))


def load_classifier(path, cls: HypothesisClass | None = None):
    return classifier_from_dict(json.loads(Path(path).read_text()), cls)


def save_matrix(path, matrix: BinaryMatrix) -> None:
    lines = [str(matrix.n)]
    lines += ["".join(str(int(v)) for v in row) for row in matrix.entries]
    Path(path).write_text("\n".join(lines) + "\n")


def load_matrix(path) -> BinaryMatrix:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix file")
    n = int(lines[0])
    if len(lines) != n + 1:
        raise ValueError(f"expected {n} matrix rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        if len(ln) != n or set(ln) - {"0", "1"}:
            raise ValueError(f"malformed matrix row {ln!r}")
        rows.append([int(c) for c in ln])
    return BinaryMatrix(np.asarray(rows, dtype=np.int8))


def hash_stanza(q: PolyHash) -> str:
    """Standalone text dump of hash parameters, one decimal value per line."""
    lines = [f"prime {q.prime}", f"degree_r {q.degree_r}"]
    lines += [f"coefficient {i} {c}" for i, c in enumerate(q.coefficients)]
    return "\n".join(lines) + "\n"
