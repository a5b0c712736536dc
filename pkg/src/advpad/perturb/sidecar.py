"""Out-of-band reversal records: JSONL keyed by packet index."""

from __future__ import annotations

import json

from .schemes import PerturbationRecord


def write_sidecar(path, records: dict[int, PerturbationRecord]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for index in sorted(records):
            f.write(json.dumps(records[index].to_json_dict(index)) + "\n")


def read_sidecar(path) -> dict[int, PerturbationRecord]:
    records: dict[int, PerturbationRecord] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            records[int(obj["index"])] = PerturbationRecord.from_json_dict(obj)
    return records
