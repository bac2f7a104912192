#!/usr/bin/env python3
"""Regenerate the committed 200-post end-to-end fixture.

The fixture is deterministic (seed 42); rerunning this script must be a
no-op unless the generator changed.
"""

import json
from pathlib import Path

from marsad.synthetic import synthetic_posts

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "posts_200.jsonl"


def main() -> None:
    records = synthetic_posts(n_posts=200, seed=42)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
    print(f"wrote {len(records)} records to {OUT}")


if __name__ == "__main__":
    main()
