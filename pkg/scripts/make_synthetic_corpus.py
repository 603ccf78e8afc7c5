#!/usr/bin/env python3
"""Generate the synthetic demo corpus shipped with the package.

2,000 publications over 2001-2010 with planted topic structure: each topic
has its own phrase vocabulary, a field-code profile on one or both taxonomy
sides, a citation-target profile (some engineering topics are cited mostly
from health/life-science topics, creating interface topics), and a yearly
output profile (two topics grow strongly enough to count as emerging at
desk scale). Deterministic for a fixed seed; the gzip header carries no
timestamp so the output is byte-stable.
"""

from __future__ import annotations

import argparse
import gzip
import json
from pathlib import Path

import numpy as np

FILLER = [
    "study design", "patient group", "follow up", "control group", "data set",
    "significant difference", "clinical outcome", "treatment effect", "sample size",
    "baseline characteristics", "risk factor", "long term", "case report",
    "systematic review", "quality of life", "standard deviation", "mean value",
    "cross sectional", "cohort study", "experimental setup",
]

GLUE = ["of the", "in", "with", "for", "and the", "based on", "during", "between"]

VERBS = ["examined", "analyzed", "measured", "compared", "evaluated", "assessed",
         "investigated", "characterized", "quantified", "modeled", "tested", "studied"]

# name, size, vocabulary, field-code profiles (weights), citation-target
# profile over topic indices, year profile ("flat", "grow", "surge"), review share
TOPICS = [
    ("stent imaging", 140,
     ["bare metal stent", "drug eluting stent", "coronary angiography", "intravascular ultrasound",
      "optical coherence tomography", "stent thrombosis", "restenosis rate", "fluoroscopy guidance",
      "vessel wall", "lumen diameter"],
     [((["cardiac & cardiovascular systems"]), 0.7), ((["cardiac & cardiovascular systems", "radiology, nuclear medicine & medical imaging"]), 0.3)],
     {0: 0.85, 4: 0.10, 12: 0.05}, "flat", 0.08),
    ("tumor surgery", 130,
     ["glioma resection", "tumor margin", "surgical navigation", "craniotomy", "postoperative deficit",
      "intraoperative monitoring", "brain mapping", "lesion volume", "recurrence free survival", "biopsy specimen"],
     [((["clinical neurology"]), 0.8), ((["clinical neurology", "surgery"]), 0.2)],
     {1: 0.85, 5: 0.10, 13: 0.05}, "flat", 0.07),
    ("antibiotic resistance", 130,
     ["antibiotic resistance", "minimum inhibitory concentration", "staphylococcus aureus",
      "biofilm formation", "gram negative bacteria", "resistance gene", "efflux pump",
      "antimicrobial susceptibility", "clinical isolate", "beta lactamase"],
     [((["infectious diseases"]), 0.75), ((["infectious diseases", "microbiology"]), 0.25)],
     {2: 0.85, 6: 0.10, 14: 0.05}, "flat", 0.08),
    ("bone implants", 140,
     ["dental implant", "osseointegration", "bone graft", "implant surface", "peri implant tissue",
      "titanium abutment", "marginal bone loss", "alveolar ridge", "crestal bone", "implant stability"],
     [((["dentistry/oral surgery & medicine"]), 0.7), ((["dentistry/oral surgery & medicine", "orthopedics"]), 0.3)],
     {3: 0.8, 7: 0.15, 15: 0.05}, "flat", 0.06),
    # bridge topics: engineering-side publications, cited largely from the health side
    ("scaffold materials", 180,
     ["electrospun scaffold", "tissue engineering scaffold", "polymer matrix", "porous structure",
      "mechanical property", "biodegradable polymer", "cell adhesion", "surface roughness",
      "composite material", "fiber diameter"],
     [((["materials science, biomaterials"]), 0.5), ((["materials science, biomaterials", "polymer science"]), 0.3),
      ((["materials science, biomaterials", "cell & tissue engineering"]), 0.2)],
     {4: 0.75, 0: 0.05, 3: 0.1, 8: 0.1}, "grow", 0.05),
    ("functional mri methods", 170,
     ["functional magnetic resonance imaging", "blood oxygenation level", "diffusion tensor imaging",
      "image registration", "signal drift", "echo planar sequence", "voxel based analysis",
      "field inhomogeneity", "k space sampling", "gradient coil"],
     [((["physics, applied"]), 0.35), ((["physics, applied", "neuroimaging"]), 0.4),
      ((["engineering, biomedical"]), 0.25)],
     {5: 0.75, 1: 0.1, 9: 0.1, 13: 0.05}, "flat", 0.05),
    ("mass spectrometry assays", 160,
     ["liquid chromatography", "tandem mass spectrometry", "analyte concentration", "ion source",
      "matrix effect", "limit of detection", "calibration curve", "sample preparation",
      "chromatographic separation", "mass accuracy"],
     [((["chemistry, analytical"]), 0.55), ((["chemistry, analytical", "biochemical research methods"]), 0.45)],
     {6: 0.75, 2: 0.1, 10: 0.1, 14: 0.05}, "flat", 0.05),
    ("radiotherapy dosimetry", 150,
     ["proton beam therapy", "dose distribution", "treatment planning system", "monte carlo simulation",
      "linear accelerator", "target volume", "organ at risk", "beam energy", "fractionation scheme",
      "dosimetric verification"],
     [((["physics, applied", "radiology, nuclear medicine & medical imaging"]), 0.5),
      ((["nuclear science & technology"]), 0.3), ((["engineering, biomedical"]), 0.2)],
     {7: 0.75, 3: 0.05, 1: 0.1, 11: 0.1}, "surge", 0.04),
    # health-side topics citing the bridges
    ("cartilage repair", 115,
     ["cartilage defect", "chondrocyte culture", "autologous transplantation", "joint function",
      "osteoarthritis progression", "synovial fluid", "subchondral bone", "knee joint",
      "repair tissue", "clinical score"],
     [((["orthopedics"]), 0.7), ((["orthopedics", "cell & tissue engineering"]), 0.3)],
     {8: 0.6, 4: 0.35, 3: 0.05}, "flat", 0.08),
    ("stroke imaging cohort", 115,
     ["ischemic stroke", "perfusion deficit", "infarct core", "penumbra volume", "thrombolysis outcome",
      "angiographic finding", "vessel occlusion", "collateral flow", "stroke severity", "imaging biomarker"],
     [((["clinical neurology", "neuroimaging"]), 0.7), ((["radiology, nuclear medicine & medical imaging"]), 0.3)],
     {9: 0.6, 5: 0.35, 1: 0.05}, "flat", 0.07),
    ("metabolite profiling", 105,
     ["metabolite profile", "serum sample", "biomarker discovery", "metabolic pathway",
      "plasma concentration", "disease marker", "urinary excretion", "lipid profile",
      "glucose metabolism", "amino acid level"],
     [((["endocrinology & metabolism"]), 0.65), ((["biochemistry & molecular biology"]), 0.35)],
     {10: 0.6, 6: 0.35, 2: 0.05}, "grow", 0.06),
    ("radiation oncology trials", 105,
     ["radiation therapy", "tumor control", "overall survival", "toxicity grade", "randomized trial",
      "dose escalation", "local recurrence", "adjuvant treatment", "prognostic factor", "tumor stage"],
     [((["oncology"]), 0.75), ((["oncology", "radiology, nuclear medicine & medical imaging"]), 0.25)],
     {11: 0.6, 7: 0.35, 1: 0.05}, "flat", 0.09),
    # engineering topics cited mostly from the engineering side (not interface)
    ("battery electrodes", 95,
     ["lithium ion battery", "electrode material", "charge capacity", "electrolyte interface",
      "cycling stability", "anode composite", "cathode structure", "energy density",
      "rate capability", "electrochemical impedance"],
     [((["electrochemistry"]), 0.6), ((["electrochemistry", "materials science, multidisciplinary"]), 0.4)],
     {12: 0.85, 13: 0.1, 4: 0.05}, "flat", 0.04),
    ("photonic devices", 95,
     ["photonic crystal", "optical waveguide", "laser cavity", "refractive index", "quantum dot emitter",
      "wavelength tuning", "silicon photonics", "optical loss", "resonance mode", "light coupling"],
     [((["optics"]), 0.6), ((["optics", "physics, applied"]), 0.4)],
     {13: 0.85, 12: 0.1, 5: 0.05}, "flat", 0.04),
    ("catalysis kinetics", 85,
     ["catalytic activity", "reaction kinetics", "transition state", "surface coverage",
      "turnover frequency", "active site", "rate constant", "adsorption energy",
      "selectivity ratio", "reaction intermediate"],
     [((["chemistry, physical"]), 0.65), ((["chemistry, physical", "chemistry, multidisciplinary"]), 0.35)],
     {14: 0.85, 12: 0.1, 6: 0.05}, "flat", 0.04),
    ("survey methodology", 85,
     ["survey response", "questionnaire item", "sampling frame", "response rate", "measurement error",
      "panel attrition", "interview mode", "population estimate", "weighting adjustment", "item nonresponse"],
     [((["economics"]), 0.5), ((["sociology"]), 0.5)],
     {15: 0.9, 11: 0.1}, "flat", 0.05),
]

COUNTRY_POOL = ["US", "GB", "DE", "CN", "NL", "FR", "JP", "IT", "CA", "AU"]
COUNTRY_W = np.array([0.24, 0.10, 0.10, 0.12, 0.06, 0.08, 0.08, 0.08, 0.07, 0.07])

YEARS = list(range(2001, 2011))


def year_weights(profile: str) -> np.ndarray:
    if profile == "flat":
        w = np.ones(10)
    elif profile == "grow":
        w = np.linspace(1.0, 3.0, 10)
    else:  # surge
        w = np.array([0.35, 0.4, 0.5, 0.7, 1.0, 1.5, 2.2, 3.0, 4.0, 5.0])
    return w / w.sum()


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="src/bibmap/data/synthetic_corpus.jsonl.gz")
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    records = []
    topic_members: list[list[int]] = [[] for _ in TOPICS]

    serial = 0
    for t, (name, size, vocab, code_profiles, cite_profile, yprofile, review_share) in enumerate(TOPICS):
        yw = year_weights(yprofile)
        years = rng.choice(YEARS, size=size, p=yw)
        years.sort()
        for k in range(size):
            pid = f"P{serial:05d}"
            serial += 1
            topic_members[t].append(len(records))

            profile_idx = rng.choice(len(code_profiles), p=np.array([p for _, p in code_profiles]))
            codes = list(code_profiles[profile_idx][0])

            n_countries = 1 + (rng.random() < 0.25)
            countries = list(rng.choice(COUNTRY_POOL, size=n_countries, replace=False, p=COUNTRY_W))

            n_title = int(rng.integers(2, 4))
            n_abs = int(rng.integers(5, 9))
            title_terms = list(rng.choice(vocab, size=n_title, replace=False))
            abs_terms = list(rng.choice(vocab, size=min(n_abs, len(vocab)), replace=False))
            abs_terms += list(rng.choice(FILLER, size=int(rng.integers(2, 5)), replace=False))
            glue = lambda: GLUE[int(rng.integers(0, len(GLUE)))]
            title = f"{title_terms[0].capitalize()} {glue()} {' and '.join(title_terms[1:])}"
            sentences = []
            for i in range(0, len(abs_terms), 2):
                chunk = abs_terms[i:i + 2]
                verb = VERBS[int(rng.integers(0, len(VERBS)))]
                sentences.append(f"We {verb} {(' ' + glue() + ' ').join(chunk)}.")
            abstract = " ".join(sentences)

            doc_type = "review" if rng.random() < review_share else "article"
            if rng.random() < 0.01:
                doc_type = "other"

            records.append({
                "id": pid,
                "year": int(years[k]),
                "title": title,
                "abstract": abstract,
                "doc_type": doc_type,
                "field_codes": codes,
                "countries": sorted(set(countries)),
                "references": [],
                "_topic": t,
                "_quality": float(rng.lognormal(0.0, 0.9)),
            })

    # Citations: each publication cites earlier work, mostly from its
    # citation-target profile, weighted by target quality.
    by_topic_year: dict[tuple[int, int], list[int]] = {}
    for i, rec in enumerate(records):
        by_topic_year.setdefault((rec["_topic"], rec["year"]), []).append(i)

    for i, rec in enumerate(records):
        profile = TOPICS[rec["_topic"]][4]
        targets = list(profile.items())
        n_refs = int(rng.integers(4, 12))
        refs = set()
        for _ in range(n_refs):
            tt = targets[rng.choice(len(targets), p=np.array([p for _, p in targets]))][0]
            pool = [j for y in range(2001, rec["year"] + 1)
                    for j in by_topic_year.get((tt, y), [])]
            pool = [j for j in pool if j != i]
            if not pool:
                continue
            quality = np.array([records[j]["_quality"] for j in pool])
            j = pool[int(rng.choice(len(pool), p=quality / quality.sum()))]
            refs.add(records[j]["id"])
        rec["references"] = sorted(refs)

    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "wb") as raw:
        # no filename or mtime in the gzip header: output must be byte-stable
        with gzip.GzipFile(filename="", fileobj=raw, mode="wb", mtime=0) as fh:
            for rec in records:
                clean = {k: v for k, v in rec.items() if not k.startswith("_")}
                fh.write((json.dumps(clean, sort_keys=True) + "\n").encode("utf-8"))
    total = len(records)
    print(f"wrote {total} records to {out_path}")


if __name__ == "__main__":
    main()
