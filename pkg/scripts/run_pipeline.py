#!/usr/bin/env python3
"""
run_pipeline.py — analyze one clip, invert it with every vocoder, score and bench.

Usage:
  python scripts/run_pipeline.py path/to/clip.wav [workdir]

MelGAN runs on seeded random weights (SPECINVERT_SEED, default 0); it exercises
the streaming path and the timing, not the audio quality.
"""
import os, subprocess, sys

def steps(wav, work):
    lms = os.path.join(work, "clip.lms")
    rep = os.path.join(work, "reports")
    cli = [sys.executable, "-m", "specinvert"]
    return [
        cli + ["analyze", wav, lms],
        cli + ["invert", lms, os.path.join(work, "ngl.wav"), "--vocoder", "ngl"],
        cli + ["invert", lms, os.path.join(work, "sgl.wav"), "--vocoder", "sgl"],
        cli + ["invert", lms, os.path.join(work, "melgan.wav"), "--vocoder", "melgan"],
        cli + ["compare", wav, os.path.join(work, "ngl.wav")],
        cli + ["compare", wav, os.path.join(work, "sgl.wav"), "--offset", "200"],
        cli + ["bench", lms, "--vocoder", "ngl", "--report", os.path.join(rep, "ngl")],
        cli + ["bench", lms, "--vocoder", "sgl", "--report", os.path.join(rep, "sgl")],
        cli + ["bench", lms, "--vocoder", "melgan", "--report", os.path.join(rep, "melgan")],
        [sys.executable, "scripts/sanity_assert.py", "--mode=delay", f"--reports={rep}"],
        [sys.executable, "scripts/sanity_assert.py", "--mode=rtf", f"--reports={rep}"],
    ]

def main():
    if len(sys.argv) < 2:
        print("Usage: run_pipeline.py clip.wav [workdir]"); sys.exit(1)
    wav = sys.argv[1]
    work = sys.argv[2] if len(sys.argv) > 2 else "pipeline_out"
    os.makedirs(work, exist_ok=True)
    env = dict(os.environ)
    env.setdefault("SPECINVERT_SEED", "0")
    for cmd in steps(wav, work):
        print("→", " ".join(cmd[1:]))
        rc = subprocess.call(cmd, env=env)
        if rc != 0:
            sys.exit(rc)
    print("Pipeline complete.")

if __name__ == "__main__":
    main()
