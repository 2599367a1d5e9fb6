"""Run the benchmark families and print one line per analysis.

    python3 scripts/run_benchmarks.py                 # default table
    python3 scripts/run_benchmarks.py fischer:3 csma:2 --direction forward --pspsc

Each line shows the model, settings, status, iterations, wall time, peak
node count and the unsafe parameter region.
"""
import argparse
import time

from hrdlha.cli import region_text
from hrdlha.engine import AnalysisConfig, analyze
from hrdlha.frontend import generate
from hrdlha.ordering import OrderingKind

DEFAULT = [
    ("fischer:2", "backward"), ("fischer:2", "forward"), ("fischer:3", "backward"),
    ("reactor:1", "backward"), ("reactor:2", "backward"), ("reactor:3", "backward"),
    ("railroad:1", "backward"), ("railroad:1", "forward"), ("railroad:2", "forward"),
    ("csma:2", "forward"),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("models", nargs="*", help="FAMILY:N, default is a fixed table")
    ap.add_argument("--direction", choices=["backward", "forward"])
    ap.add_argument("--ordering", default="coefficient", choices=[k.value for k in OrderingKind])
    ap.add_argument("--pspsc", action="store_true")
    ap.add_argument("--max-iterations", type=int, default=200)
    args = ap.parse_args(argv)
    runs = [(m, args.direction or "backward") for m in args.models] if args.models else \
        [(m, args.direction or d) for m, d in DEFAULT]
    for ref, direction in runs:
        cfg = AnalysisConfig(direction, args.pspsc, args.ordering, args.max_iterations)
        t = time.perf_counter()
        res = analyze(generate(ref), cfg)
        secs = time.perf_counter() - t
        print("%-11s %-8s %-11s pspsc=%-5s %-15s it=%-4d %7.2fs nodes=%-7d %s" % (
            ref, direction, args.ordering, args.pspsc, res.status.value, res.stats.iterations,
            secs, res.stats.peak_nodes, region_text(res.manager, res.unsafe_params)), flush=True)


if __name__ == "__main__":
    main()
