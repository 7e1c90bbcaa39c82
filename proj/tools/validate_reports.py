#!/usr/bin/env python3
"""Validate report and scenario JSON files against the shipped schemas."""
import json
import pathlib
import sys

import jsonschema


def main() -> int:
    if len(sys.argv) < 3:
        print("usage: validate_reports.py SCHEMA FILE...", file=sys.stderr)
        return 2
    schema = json.loads(pathlib.Path(sys.argv[1]).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for name in sys.argv[2:]:
        doc = json.loads(pathlib.Path(name).read_text())
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        for e in errors:
            print(f"{name}: {'/'.join(map(str, e.path))}: {e.message}")
        failures += bool(errors)
        if not errors:
            print(f"{name}: ok")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
