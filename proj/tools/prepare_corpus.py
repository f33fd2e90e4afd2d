#!/usr/bin/env python3
"""Build the natural-image test corpus from sample photos bundled with
scikit-image, matplotlib and scikit-learn.

Each source is center-cropped to the target aspect ratio and resampled with
a Lanczos filter. Outputs are lossless PNG so the raster is exact.
"""
import argparse
import importlib.util
import os

from PIL import Image

SOURCES = [
    ("skimage", "data/astronaut.png"),
    ("skimage", "data/coffee.png"),
    ("skimage", "data/chelsea.png"),
    ("skimage", "data/motorcycle_left.png"),
    ("skimage", "data/motorcycle_right.png"),
    ("skimage", "data/rocket.jpg"),
    ("skimage", "data/hubble_deep_field.jpg"),
    ("skimage", "data/retina.jpg"),
    ("skimage", "data/ihc.png"),
    ("matplotlib", "mpl-data/sample_data/grace_hopper.jpg"),
    ("sklearn", "datasets/images/china.jpg"),
    ("sklearn", "datasets/images/flower.jpg"),
]

SIZES = {"corpus": (672, 480), "corpus_small": (240, 128)}


def package_dir(name):
    spec = importlib.util.find_spec(name)
    return os.path.dirname(spec.origin)


def fit(img, w, h):
    sw, sh = img.size
    target = w / h
    if sw / sh > target:
        cw = round(sh * target)
        x0 = (sw - cw) // 2
        img = img.crop((x0, 0, x0 + cw, sh))
    else:
        ch = round(sw / target)
        y0 = (sh - ch) // 2
        img = img.crop((0, y0, sw, y0 + ch))
    return img.resize((w, h), Image.LANCZOS)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "tests", "data"))
    args = ap.parse_args()
    for sub, (w, h) in SIZES.items():
        os.makedirs(os.path.join(args.out, sub), exist_ok=True)
        for pkg, rel in SOURCES:
            src = os.path.join(package_dir(pkg), rel)
            name = os.path.splitext(os.path.basename(rel))[0]
            img = Image.open(src).convert("RGB")
            fit(img, w, h).save(os.path.join(args.out, sub, name + ".png"), optimize=True)


if __name__ == "__main__":
    main()
