"""Gini at the test3 snapshots under the two return-noise scalings.

``fixed`` keeps the noise std at ``eta_rel * S0`` throughout; ``tracking``
uses ``eta_rel * S`` at the current price. Both are compared with their own
Fokker-Planck variance parameter ``b``.
"""

import argparse
from dataclasses import replace

from kinmarket.experiments import fp_trajectory, parse_int_list, preset, simulate_seeds, snapshot_metrics


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", default="0-9")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    base = replace(preset("test3"), seeds=parse_int_list(args.seeds))
    for label, tracks in (("fixed", False), ("tracking", True)):
        cfg = replace(base, eta_tracks_price=tracks)
        records = simulate_seeds(cfg, args.jobs)
        traj = fp_trajectory(cfg)
        rows = [snapshot_metrics(cfg, records, traj, t) for t in cfg.snapshot_times]
        print(label + ": " + "; ".join(
            f"t={m['t']} G={m['gini']:.3f} b={m['b_fit']:.3f}/{m['b_fp']:.3f}" for m in rows))


if __name__ == "__main__":
    main()
