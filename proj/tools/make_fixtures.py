#!/usr/bin/env python3
# Copyright 2026 The tsrank Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the bundled fixtures deterministically.

Usage: make_fixtures.py [OUT_DIR]   (default: data/fixtures)
"""

import json
import pathlib
import random
import sys

SEED = 20260101
QUERIES = 200
CANDIDATES = 20

DRUGS = ["metoprolol", "lisinopril", "atorvastatin", "metformin", "apixaban", "furosemide",
         "ceftriaxone", "vancomycin", "pantoprazole", "heparin", "insulin glargine",
         "amlodipine", "prednisone", "albuterol", "ondansetron", "acetaminophen"]
LABS = ["CBC with differential", "basic metabolic panel", "troponin I", "lactate",
        "blood cultures x2", "lipase", "TSH", "hemoglobin A1c", "BNP", "urinalysis",
        "PT/INR", "magnesium level", "procalcitonin", "arterial blood gas"]
IMAGING = ["chest X-ray PA/lateral", "CT head without contrast", "CT abdomen/pelvis with contrast",
           "renal ultrasound", "transthoracic echocardiogram", "CT angiography chest",
           "MRI lumbar spine", "lower extremity venous duplex"]
ROUTES = ["PO", "IV", "SC"]
FREQS = ["daily", "BID", "q8h", "q6h PRN", "once"]
COMPLAINTS = ["chest pain", "shortness of breath", "fever and dysuria", "abdominal pain",
              "syncope", "leg swelling", "hyperglycemia", "altered mental status",
              "productive cough", "palpitations"]
HISTORY = ["hypertension", "type 2 diabetes", "CKD stage 3", "atrial fibrillation", "COPD",
           "heart failure", "no significant history", "prior stroke"]


def order_text(rng):
    kind = rng.random()
    if kind < 0.5:
        dose = rng.choice([5, 10, 20, 25, 40, 50, 100, 250, 500, 1000])
        return (f"{rng.choice(DRUGS)} {dose} mg {rng.choice(ROUTES)} "
                f"{rng.choice(FREQS)}")
    if kind < 0.8:
        return f"{rng.choice(LABS)} {rng.choice(['now', 'in AM', 'q6h x3', 'once'])}"
    return f"{rng.choice(IMAGING)} {rng.choice(['routine', 'stat', 'today'])}"


def make_query(rng, i):
    age = rng.randint(19, 92)
    sex = rng.choice(["F", "M"])
    context = (f"{age}{sex} presenting with {rng.choice(COMPLAINTS)}; history of "
               f"{rng.choice(HISTORY)}. Vitals: HR {rng.randint(55, 130)}, "
               f"BP {rng.randint(90, 180)}/{rng.randint(50, 110)}, "
               f"SpO2 {rng.randint(86, 100)}%.")
    patient = None
    if rng.random() < 0.8:
        patient = (f"Allergies: {rng.choice(['NKDA', 'penicillin', 'sulfa', 'iodinated contrast'])}. "
                   f"Creatinine {rng.randint(6, 30) / 10:.1f} mg/dL.")
    texts = []
    while len(texts) < CANDIDATES:
        t = order_text(rng)
        if t not in texts:
            texts.append(t)
    qid = f"q{i:03d}"
    candidates = [{"id": f"{qid}-c{j:02d}", "text": t} for j, t in enumerate(texts)]
    # About a quarter of lists mimic a top-19 retrieval with the signed order
    # appended last; the rest carry it at a uniform position.
    oracle_inserted = rng.random() < 0.25
    relevant = CANDIDATES - 1 if oracle_inserted else rng.randrange(CANDIDATES)
    line = {"query_id": qid, "context": context}
    if patient is not None:
        line["patient"] = patient
    line["candidates"] = candidates
    line["relevant_id"] = candidates[relevant]["id"]
    if oracle_inserted:
        line["oracle_inserted"] = True
    return line


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/fixtures")
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    with open(out / "mock_corpus_200.jsonl", "w", encoding="utf-8", newline="\n") as f:
        for i in range(QUERIES):
            f.write(json.dumps(make_query(rng, i), ensure_ascii=False) + "\n")

    shares = {"epochs": [
        {"epoch": 0, "easy": 34.0, "medium": 56.0, "hard": 10.0},
        {"epoch": 1, "easy": 39.5, "medium": 47.0, "hard": 13.5},
        {"epoch": 2, "easy": 43.0, "medium": 44.0, "hard": 13.0},
        {"epoch": 3, "easy": 46.0, "medium": 41.0, "hard": 13.0},
        {"epoch": 4, "easy": 49.0, "medium": 38.0, "hard": 13.0},
    ]}
    with open(out / "bucket_shares_5_epochs.json", "w", encoding="utf-8", newline="\n") as f:
        json.dump(shares, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
