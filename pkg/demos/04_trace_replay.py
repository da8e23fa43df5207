"""
Replaying a trace
=================

Each run writes one JSON record per operation.  State records carry a
snapshot, so the invariants can be rechecked from the file alone, and a
second run with the same scenario gives the same bytes.
"""

import json
import tempfile
from pathlib import Path

from coneforce.forcing.engine import Engine
from coneforce.forcing.scenario import bundled
from coneforce.forcing.trace import dumps, read_trace, verify_records, write_trace

sc = bundled("case_i_once")
eng = Engine(sc)
eng.run()

out = Path(tempfile.mkdtemp()) / "case_i_once.jsonl"
write_trace(eng.records, out)
print(out, len(out.read_text().splitlines()), "records")

for rec in eng.records:
    if rec["op"] == "r_i" and rec["outcome"] == "case_i":
        print(f"step {rec['step']}: case i on part {rec['part']}{rec['side']}, stem {rec['stem_before']!r} -> {rec['stem_after']!r}")
    if rec["op"] == "state":
        print(f"step {rec['step']}: k={len(rec['stems'])}, stems {rec['stems'][:2]}{' ...' if len(rec['stems']) > 2 else ''}")

records = read_trace(out)
print("recheck:", verify_records(records) or "clean")

again = Engine(sc)
again.run()
print("identical rerun:", dumps(again.records) == out.read_text())

# plant a right stem on an element of A and the recheck objects
bad = json.loads(json.dumps(records))
last = [r for r in bad if r["op"] == "state"][-1]
last["stems"][0][1] = "1"
print("after tampering:", verify_records(bad)[:2])
print(json.dumps(records[-1]))
