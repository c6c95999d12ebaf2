#!/usr/bin/env python3
"""Emit the worked-example corpus, run every problem through the dispatcher,
and compare against the expected-status manifest.

Usage: python scripts/run_corpus.py [--dir DIR]
"""

import argparse
import json
import os
import time

from freeconvex.io import emit_corpus, parse_problem, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dir", default="corpus_out")
    args = ap.parse_args()
    emit_corpus(args.dir)
    manifest = json.load(open(os.path.join(args.dir, "manifest.json")))
    bad = 0
    for name, meta in sorted(manifest.items()):
        if not name.endswith(".json") or name == "manifest.json":
            continue
        pf = parse_problem(open(os.path.join(args.dir, name), "rb").read())
        t0 = time.time()
        rep = run(pf)
        ok = rep.status == meta["expect"]
        bad += not ok
        flag = "ok " if ok else "FAIL"
        print(f"{flag} {name:44s} {rep.status:10s} "
              f"(expect {meta['expect']}, {time.time() - t0:.2f} s)")
    print("all good" if not bad else f"{bad} mismatches")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
