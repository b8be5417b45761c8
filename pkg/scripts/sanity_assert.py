#!/usr/bin/env python3
"""
sanity_assert.py — fail fast when bench reports look wrong.

Usage:
  python scripts/sanity_assert.py --mode=delay [--reports=reports]
  python scripts/sanity_assert.py --mode=rtf   [--reports=reports]

delay: every streaming report carries the delay its configuration implies
       (sGL<k>: k hops look-ahead plus one frame of overlap; sMelGAN0: none).
rtf:   every streaming vocoder ran faster than real time.

Bypass (slow CI machines):
  ALLOW_SLOW=1
"""
import glob, json, os, re, sys

HOP_MS = 12.5      # 200 samples at 16 kHz
OVERLAP_MS = 37.5  # frame_size - frame_step

def _reports(rep):
    out = {}
    for p in sorted(glob.glob(os.path.join(rep, "*.json"))):
        with open(p, "r", encoding="utf-8") as f:
            d = json.load(f)
        if "vocoder" in d:
            out[p] = d
    return out

def assert_delay(rep):
    reports = _reports(rep)
    if not reports:
        print(f"sanity_assert(delay): no reports in {rep}"); sys.exit(1)
    bad = []
    for p, d in reports.items():
        m = re.fullmatch(r"sGL(\d+)", d["vocoder"])
        if m:
            want = (int(m.group(1)) * HOP_MS, int(m.group(1)) * HOP_MS + OVERLAP_MS)
        elif d["vocoder"] == "sMelGAN0":
            want = (0.0, 0.0)
        else:
            continue
        got = (d.get("lookahead_delay_ms"), d.get("total_delay_ms"))
        if got[0] is None or got[1] is None or any(abs(g - w) > 1e-9 for g, w in zip(got, want)):
            bad.append(f"{os.path.basename(p)}: {got} != {want}")
    if bad:
        print("sanity_assert(delay): FAIL " + "; ".join(bad)); sys.exit(2)
    print(f"sanity_assert(delay): PASS ({len(reports)} reports)"); sys.exit(0)

def assert_rtf(rep):
    reports = _reports(rep)
    if not reports:
        print(f"sanity_assert(rtf): no reports in {rep}"); sys.exit(1)
    # nGL reports carry no per-hop latency; only streaming vocoders must keep up
    slow = [f"{d['vocoder']}={d.get('rtf')}" for d in reports.values()
            if d.get("latency_mean_ms") is not None and not (d.get("rtf") or 0) > 1.0]
    if slow and os.environ.get("ALLOW_SLOW", "0") != "1":
        print("sanity_assert(rtf): FAIL (" + ", ".join(slow) + ")"); sys.exit(2)
    print("sanity_assert(rtf): PASS"); sys.exit(0)

def main():
    mode, rep = None, "reports"
    for a in sys.argv[1:]:
        if a.startswith("--mode="): mode = a.split("=", 1)[1]
        if a.startswith("--reports="): rep = a.split("=", 1)[1]
    if mode == "delay": assert_delay(rep)
    elif mode == "rtf": assert_rtf(rep)
    else:
        print("Usage: sanity_assert.py --mode=delay|rtf [--reports=DIR]"); sys.exit(1)

if __name__ == "__main__":
    main()
