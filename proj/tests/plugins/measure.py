#!/usr/bin/env python3
"""Fake on-device measurement: deterministic latency and memory derived from
the query so tests can predict the reply. Modes (first argv argument):

  ok (default)  valid reply with repeats
  norepeat      valid reply without the repeats field
  neg           negative latency
  badrepeat     repeats 0
  missing       omits peak_memory_bytes
"""
import json
import sys


def main():
    q = json.load(sys.stdin)
    mode = sys.argv[1] if len(sys.argv) > 1 else "ok"
    cfg = q["config"]
    lat = cfg["n_layer"] * q["seq_len"] / 1000.0
    mem = cfg["d_model"] * 1000 * q["batch"] * q["bytes_per_param"]
    if mode == "neg":
        reply = {"latency_ms": -lat, "peak_memory_bytes": mem}
    elif mode == "badrepeat":
        reply = {"latency_ms": lat, "peak_memory_bytes": mem, "repeats": 0}
    elif mode == "missing":
        reply = {"latency_ms": lat}
    elif mode == "norepeat":
        reply = {"latency_ms": lat, "peak_memory_bytes": mem}
    else:
        reply = {"latency_ms": lat, "peak_memory_bytes": mem, "repeats": 5}
    sys.stdout.write(json.dumps(reply) + "\n")


if __name__ == "__main__":
    main()
