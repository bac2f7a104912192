#!/usr/bin/env python3
"""Regenerate docs/openapi.json from the live FastAPI app."""

import json
import tempfile
from pathlib import Path

from marsad.api import create_app
from marsad.config import Config

OUT = Path(__file__).resolve().parent.parent / "docs" / "openapi.json"


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Config(tokens={"schema": "schema"}, data_dir=Path(tmp) / "data")
        doc = create_app(config=cfg).openapi()
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
