"""Compare the numba and pure-numpy kernel backends.

Usage:  python benchmarks/bench_backends.py [--repeats N]

Each backend runs in its own subprocess (the backend is fixed at import
time by SPECTOOL_BACKEND), times the two hot kernels plus their user-facing
operations, and the parent prints a table with speedups. Results are also
checked for cross-backend bit-identity while we're at it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import subprocess
import sys
import time

CASES = [
    ("radial_sums 512x512", "radial", 512),
    ("radial_sums 2048x2048", "radial", 2048),
    ("photon_noise 256x256", "photon", 256),
    ("photon_noise 1024x1024", "photon", 1024),
]


def _worker(repeats: int) -> None:
    import numpy as np

    from spectool import ImageBuffer, kernels, photon_noise_corrupt

    kernels.warmup()
    rng = np.random.default_rng(0)
    results = {"backend": kernels.backend(), "cases": {}}

    for name, case, size in CASES:
        if case == "radial":
            amp = np.ascontiguousarray(rng.random((size, size)))
            nbands = size // 2 + 1

            def run():
                return kernels.radial_sums(amp, nbands)[0]

        else:
            image = ImageBuffer(rng.random((size, size)))

            def run():
                return photon_noise_corrupt(image, 255.0, seed=42).pixels

        run()  # warm path-specific caches
        best = float("inf")
        for _ in range(repeats):
            started = time.perf_counter()
            out = run()
            best = min(best, time.perf_counter() - started)
        digest = hashlib.sha256(np.ascontiguousarray(out).tobytes()).hexdigest()[:16]
        results["cases"][name] = {"seconds": best, "digest": digest}

    print(json.dumps(results))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.worker:
        _worker(args.repeats)
        return

    reports = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, SPECTOOL_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--worker",
             "--repeats", str(args.repeats)],
            env=env,
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            print(f"{backend}: unavailable ({proc.stderr.strip().splitlines()[-1]})")
            continue
        reports[backend] = json.loads(proc.stdout.splitlines()[-1])

    if not reports:
        print("no backend produced results")
        return

    print(f"{'case':<24} " + "".join(f"{b:>12} " for b in reports) + "speedup")
    for name, _, _ in CASES:
        row = f"{name:<24} "
        times = {}
        for backend, report in reports.items():
            seconds = report["cases"][name]["seconds"]
            times[backend] = seconds
            row += f"{seconds * 1e3:>10.2f}ms "
        if len(times) == 2:
            row += f"{times['numpy'] / times['numba']:>6.1f}x"
        print(row)

    if len(reports) == 2:
        matches = all(
            reports["numba"]["cases"][name]["digest"]
            == reports["numpy"]["cases"][name]["digest"]
            for name, _, _ in CASES
        )
        print(f"\ncross-backend outputs bit-identical: {matches}")


if __name__ == "__main__":
    main()
