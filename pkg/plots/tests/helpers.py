import csv

import numpy as np
from PIL import Image


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def long_heatmap_rows(value_fn, ts=range(5), alphas=(0.1, 0.3, 0.5, 0.7, 0.9),
                      series="x"):
    return [[t, a, series, value_fn(t, a)] for t in ts for a in alphas]


def center_colors(png_path):
    """Distinct pixel colors in a central crop that lies inside the axes."""
    img = np.asarray(Image.open(png_path).convert("RGB"))
    h, w, _ = img.shape
    crop = img[int(0.40 * h):int(0.60 * h), int(0.40 * w):int(0.60 * w)]
    return {tuple(px) for px in crop.reshape(-1, 3)}


def report(criterion, description, ok):
    print(f"\n[criterion {criterion:02d}] {'PASS' if ok else 'FAIL'}: {description}")
    assert ok
