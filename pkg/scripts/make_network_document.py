#!/usr/bin/env python3
"""Regenerate the bundled network document (src/idss/data/)."""

import argparse
from pathlib import Path

from idss.service.document import default_document, save_document


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "-o",
        "--out",
        default=str(Path(__file__).resolve().parents[1] / "src/idss/data/uk_food_network.json"),
    )
    args = parser.parse_args()
    doc = default_document()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_document(doc, out)
    print(f"wrote {out} ({len(doc['nodes'])} nodes, {len(doc['edges'])} edges)")


if __name__ == "__main__":
    main()
