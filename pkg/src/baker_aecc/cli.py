"""Command-line driver: ``baker-aecc --input img.pgm --snr-db 10,14,18 --out results/``."""
import argparse
import math
import sys

from .imaging import PGMError, load_pgm
from .sim import SYSTEMS, ExperimentConfig, format_report, run_sweep


def parse_snr_list(text):
    """Comma-separated Ep/N0 values in dB; ``noiseless`` or ``inf`` disables the noise."""
    out = []
    for part in text.split(","):
        part = part.strip().lower()
        if not part:
            continue
        if part in ("noiseless", "inf", "+inf"):
            out.append(math.inf)
        else:
            try:
                out.append(float(part))
            except ValueError:
                raise argparse.ArgumentTypeError(f"bad SNR value {part!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("SNR list must not be empty")
    return out


def build_parser():
    p = argparse.ArgumentParser(
        prog="baker-aecc",
        description="Transmit a grayscale PGM over AWGN with the tail-biting baker's map analog code.",
    )
    p.add_argument("--input", required=True, help="binary PGM (P5, maxval 255)")
    p.add_argument("--k", type=int, default=3, help="branches / source symbols per block (default 3)")
    p.add_argument("--n", type=int, default=2, help="states per branch (default 2, the (12,3) code)")
    p.add_argument("--delta", type=float, default=1.0, help="peak amplitude (default 1)")
    p.add_argument("--snr-db", type=parse_snr_list, default=[10.0, 14.0, 18.0, 22.0, 24.0],
                   help="comma-separated Ep/N0 list in dB (default 10,14,18,22,24)")
    p.add_argument("--ep-mode", choices=("measured", "nominal"), default="measured")
    p.add_argument("--trials", type=int, default=1, help="noise realizations per SNR point")
    p.add_argument("--seed", type=int, default=0, help="master RNG seed")
    p.add_argument("--system", choices=SYSTEMS, default="analog")
    p.add_argument("--out", required=True, help="output directory")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        img = load_pgm(args.input)
        cfg = ExperimentConfig(
            image=img,
            snr_db=args.snr_db,
            k=args.k,
            n=args.n,
            delta=args.delta,
            ep_mode=args.ep_mode,
            seed=args.seed,
            trials=args.trials,
            system=args.system,
            out_dir=args.out,
            input_path=args.input,
        )
        result = run_sweep(cfg)
    except (OSError, PGMError, ValueError, NotImplementedError) as exc:
        print(f"baker-aecc: error: {exc}", file=sys.stderr)
        return 2
    print(format_report(cfg, result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
