"""Regenerate the site-table fixtures.

Each site directory gets sites.csv plus 1 x N float32 ENVI rasters holding
the published relative availability and post-NNLS abundance, one pixel per
site, so `lithomap report` can recompute the published correlations.
"""

import csv
import pathlib
import struct

TABLES = {
    "jaffna": (
        [1.42, 24.24, 4.88, 48.87],
        [0.0984, 0.3234, 0.1663, 0.7688],
        [0.1269, 0.5874, 0.1022, 0.7652],
    ),
    "pulmoddai": (
        [0.59, 1.53, 12.27, 10.73, 1.95, 3.80, 5.70, 8.17],
        [0.3670, 0.3021, 0.9893, 0.4922, 0.2917, 0.4912, 0.687, 0.7694],
        [0.3670, 0.3954, 0.9607, 0.4922, 0.3271, 0.4565, 0.687, 0.7911],
    ),
    "mannar": (
        [0.29, 0.46, 0.09, 0.21, 0.36, 0.39, 0.49, 0.36, 0.35],
        [0.4649, 0.445, 0.4563, 0.3743, 0.705, 0.5619, 0.7275, 0.668, 0.6358],
        [0.4679, 0.4258, 0.4958, 0.5863, 0.7982, 0.6587, 0.8513, 0.8134, 0.6971],
    ),
    "giants_tank": (
        [4.40, 1.20, 32, 2.10, 7.10],
        [0.5479, 0.5192, 0.8199, 0.5252, 0.8724],
        [0.6331, 0.5993, 0.9976, 0.6234, 0.9256],
    ),
}

HEADER = """ENVI
description = {{lithomap}}
samples = {n}
lines = 1
bands = 1
header offset = 0
file type = ENVI Standard
data type = 4
interleave = bsq
byte order = 0
data ignore value = -1
"""


def write_raster(stem: pathlib.Path, values):
    stem.with_suffix(".hdr").write_text(HEADER.format(n=len(values)))
    stem.with_suffix(".img").write_bytes(struct.pack("<%df" % len(values), *values))


def main():
    root = pathlib.Path(__file__).resolve().parent
    for name, (truth, ra, alpha) in TABLES.items():
        d = root / name
        d.mkdir(exist_ok=True)
        with open(d / "sites.csv", "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["site_id", "row", "col", "ground_truth_pct"])
            for i, g in enumerate(truth):
                w.writerow([f"site_{i + 1}", 0, i, g])
        write_raster(d / "ra_map", ra)
        write_raster(d / "alpha_map", alpha)


if __name__ == "__main__":
    main()
