#!/usr/bin/env python3
"""Convert MT-Bench prompt exports into the question-file schema.

The benchmark data itself is not shipped with this repository. Download the
prompts (for example the `mt_bench_prompts` dataset export, a JSON array of
records with `prompt`, `category` and optional `reference` fields) and run:

    python3 scripts/convert_mt_bench.py mt_bench_prompts.json > questions.jsonl

Output: one JSON object per line with fields {id, category, turns[2],
reference_answers?} — the format `cqot run --questions` expects.
"""

import argparse
import json
import sys


def convert(records, categories):
    counters = {}
    for record in records:
        category = str(record.get("category", "")).lower()
        if categories and category not in categories:
            continue
        turns = record.get("prompt") or record.get("turns")
        if not isinstance(turns, list) or len(turns) != 2:
            continue
        counters[category] = counters.get(category, 0) + 1
        out = {
            "id": f"{category}-{counters[category]:03d}",
            "category": category,
            "turns": [str(t) for t in turns],
        }
        reference = record.get("reference") or record.get("reference_answers")
        if isinstance(reference, list) and reference:
            out["reference_answers"] = [str(r) for r in reference[:2]]
        yield out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("input", help="JSON array of benchmark records")
    parser.add_argument(
        "--categories",
        default="reasoning,math",
        help="comma-separated category filter (default: reasoning,math)",
    )
    args = parser.parse_args()

    categories = {c.strip().lower() for c in args.categories.split(",") if c.strip()}
    with open(args.input, encoding="utf-8") as handle:
        records = json.load(handle)

    count = 0
    for item in convert(records, categories):
        json.dump(item, sys.stdout, ensure_ascii=False)
        sys.stdout.write("\n")
        count += 1
    print(f"wrote {count} questions", file=sys.stderr)


if __name__ == "__main__":
    main()
