"""Run the two-path GA preset over several seeds and report final depths.

    python3 scripts/ga_seeds.py --seeds 5 [--preset ga-two-path] [--floor 20]
"""

import argparse
import json

from photonic_sic.config import load_preset, resolve
from photonic_sic.pipelines import run_config


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--preset", default="ga-two-path")
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--first", type=int, default=0)
    ap.add_argument("--floor", type=float, default=20.0)
    args = ap.parse_args()
    raw, _ = load_preset(args.preset)
    hits = 0
    rows = []
    for seed in range(args.first, args.first + args.seeds):
        res = run_config(resolve(raw, seed=seed)).summary
        best = res["stage3"]["best"]
        ok = res["depth_db"] >= args.floor
        hits += ok
        rows.append({"seed": seed, "depth_db": res["depth_db"], "best": best})
        print(f"seed {seed:3d}  depth {res['depth_db']:6.2f} dB  delays {best['delays_ps']}  "
              f"amplitudes {best['amplitudes']}  {'ok' if ok else 'below floor'}", flush=True)
    print(f"{hits}/{args.seeds} seeds reach {args.floor:g} dB")
    print(json.dumps(rows))


if __name__ == "__main__":
    main()
