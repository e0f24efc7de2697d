"""Gini and lognormal fit of the test3 preset at its snapshot times."""

import argparse
from dataclasses import replace

from kinmarket.experiments import fp_trajectory, parse_int_list, preset, simulate_seeds, snapshot_metrics


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", default="0-19")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--fixed-eta", action="store_true",
                        help="keep the return-noise std at its initial value instead of tracking the price")
    args = parser.parse_args()

    cfg = replace(preset("test3"), seeds=parse_int_list(args.seeds))
    if args.fixed_eta:
        cfg = replace(cfg, eta_tracks_price=False)
    records = simulate_seeds(cfg, args.jobs)
    traj = fp_trajectory(cfg)
    print(f"{'t':>5} {'gini':>8} {'se':>7} {'ks':>7} {'b_fit':>7} {'b_fp':>7}")
    for t in cfg.snapshot_times:
        m = snapshot_metrics(cfg, records, traj, t)
        print(f"{t:5d} {m['gini']:8.4f} {m['gini_se']:7.4f} {m['ks']:7.4f} {m['b_fit']:7.4f} {m['b_fp']:7.4f}")


if __name__ == "__main__":
    main()
