"""Write the superlattice offset potential as PGM and CSV, and the bowtie graph as JSON."""

import argparse
import json
from pathlib import Path

from bowtie_mbqc import lattice


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", type=Path, default=Path("out"))
    ap.add_argument("--v1", type=float, default=1.0)
    ap.add_argument("--v2", type=float, default=1.0)
    ap.add_argument("--resolution", type=int, default=256)
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    field = lattice.potential_map(args.v1, args.v2, resolution=args.resolution)
    (args.outdir / "potential.pgm").write_text(field.to_pgm())
    (args.outdir / "potential.csv").write_text(field.to_csv())
    (args.outdir / "bowtie_3x3.json").write_text(json.dumps(lattice.build_bowtie(3, 3).to_json(), indent=2))
    print(f"wrote potential.pgm, potential.csv, bowtie_3x3.json to {args.outdir}")


if __name__ == "__main__":
    main()
