#!/usr/bin/env python3
"""Build the committed reference evaluation fixture.

Writes tests/data/reference_labels.jsonl (ground truth for the seed-42
corpus) and tests/data/reference_predictions.jsonl (a synthetic model run
with known aggregate metrics).  The predictions recover every labeled
error type exactly, but mis-report the issue *count* on a fixed subset of
items:

  - single-error items, ordered by item_id: the first 4 over-count by one
    and the next 12 under-count by one (16 off out of 42);
  - multi-error items, ordered by item_id: the first 8 over-count by one
    and the next 8 under-count by one (16 off out of 30).

That makes the aggregate metrics exact rationals: overall count MAE
32/72 = 0.44, bias -8/72 = -0.11, single-item MAE 16/42 = 0.38, and
multi-item MAE 16/30 = 0.53 (all shown at two decimals).

Run from the repository root:  python3 scripts/build_reference_run.py
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from vizlint.corpus import CorpusConfig, generate_corpus  # noqa: E402
from vizlint.corpus import label_record_to_json  # noqa: E402

SINGLE_OVER = 4
SINGLE_UNDER = 12
MULTI_OVER = 8
MULTI_UNDER = 8


def main() -> int:
    with tempfile.TemporaryDirectory() as tmp:
        items = generate_corpus(CorpusConfig(seed=42, output_dir=Path(tmp)))

    singles = sorted(
        (i for i in items if i.label.count == 1), key=lambda i: i.item_id
    )
    multis = sorted(
        (i for i in items if i.label.count >= 2), key=lambda i: i.item_id
    )
    offsets: dict[str, int] = {}
    for item in singles[:SINGLE_OVER]:
        offsets[item.item_id] = 1
    for item in singles[SINGLE_OVER:SINGLE_OVER + SINGLE_UNDER]:
        offsets[item.item_id] = -1
    for item in multis[:MULTI_OVER]:
        offsets[item.item_id] = 1
    for item in multis[MULTI_OVER:MULTI_OVER + MULTI_UNDER]:
        offsets[item.item_id] = -1

    data_dir = REPO / "tests" / "data"
    data_dir.mkdir(parents=True, exist_ok=True)

    with (data_dir / "reference_labels.jsonl").open("w") as fh:
        for item in items:
            fh.write(label_record_to_json(item.label) + "\n")

    with (data_dir / "reference_predictions.jsonl").open("w") as fh:
        for item in items:
            record = {
                "item_id": item.item_id,
                "error_types": sorted(e.value for e in item.label.error_types),
                "count": item.label.count + offsets.get(item.item_id, 0),
            }
            fh.write(json.dumps(record) + "\n")

    print(f"wrote reference fixture for {len(items)} items to {data_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
