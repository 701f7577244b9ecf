"""CSV helper shared by the figure scripts."""

import argparse
import csv
from pathlib import Path


def out_dir(description: str) -> Path:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out", default="results", help="output directory (default: results)")
    path = Path(p.parse_args().out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format(float(v), ".12g") if not isinstance(v, str) else v for v in row])
    print(f"wrote {path}")
