#!/usr/bin/env python3
"""Convert face / non-face image sources into directories of 32x32 8-bit PGM tiles.

The experiment runner only reads binary PGM (P5). This script is the
pre-conversion step for the face-detection experiments.

Sources:
  utk      UTKFace directory of JPEGs -> grayscale, area-downscaled to 32x32
  cifar    CIFAR-10 python batches    -> Rec.601 luma, kept at 32x32
  skimage  scikit-image's bundled LFW subset (100 faces, 100 non-faces,
           25x25) plus random crops from the bundled grayscale test images.
           Needs no download; used as the offline stand-in.

Output layout (under --out):
  faces_train/ faces_test/ faces_collage/ nonfaces_train/ nonfaces_test/

faces_collage holds people that appear in neither faces_train nor faces_test.
"""

import argparse
import os
import pickle
import random

import numpy as np

TILE = 32


def write_pgm(path, img):
    img = np.asarray(img, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (img.shape[1], img.shape[0]))
        f.write(img.tobytes())


def luma601(rgb):
    rgb = np.asarray(rgb, dtype=np.float64)
    return np.clip(0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2] + 0.5, 0, 255).astype(np.uint8)


def area_resize(img, size=TILE):
    from PIL import Image

    return np.asarray(Image.fromarray(np.asarray(img, dtype=np.uint8)).resize((size, size), Image.BOX))


def augment(img, shifts):
    """Horizontal flip x small translations (edge-replicated)."""
    out = []
    for flip in (False, True):
        base = img[:, ::-1] if flip else img
        for dx, dy in shifts:
            padded = np.pad(base, 2, mode="edge")
            out.append(padded[2 + dy:2 + dy + TILE, 2 + dx:2 + dx + TILE])
    return out


def dump(dirpath, tiles):
    os.makedirs(dirpath, exist_ok=True)
    for i, t in enumerate(tiles):
        write_pgm(os.path.join(dirpath, "%06d.pgm" % i), t)


def split(items, test_fraction, rng):
    items = list(items)
    rng.shuffle(items)
    n_test = int(round(len(items) * test_fraction))
    return items[n_test:], items[:n_test]


def split3(items, test_fraction, collage_fraction, rng):
    rest, test = split(items, test_fraction, rng)
    n_collage = int(round(len(items) * collage_fraction))
    return rest[n_collage:], test, rest[:n_collage]


def from_utk(args, rng):
    from PIL import Image

    files = sorted(f for f in os.listdir(args.utk) if f.lower().endswith((".jpg", ".png")))
    faces = [area_resize(luma601(np.asarray(Image.open(os.path.join(args.utk, f)).convert("RGB")))) for f in files]
    return split3(faces, args.test_fraction, args.collage_fraction, rng)


def from_cifar(args, rng):
    tiles = []
    for name in sorted(os.listdir(args.cifar)):
        if not name.startswith(("data_batch", "test_batch")):
            continue
        with open(os.path.join(args.cifar, name), "rb") as f:
            batch = pickle.load(f, encoding="bytes")
        data = batch[b"data"].reshape(-1, 3, TILE, TILE).transpose(0, 2, 3, 1)
        tiles.extend(luma601(x) for x in data)
    return split(tiles, args.test_fraction, rng)


def from_skimage(args, rng):
    import skimage.data as data

    lfw = (data.lfw_subset() * 255.0 + 0.5).astype(np.uint8)
    faces = [area_resize(x) for x in lfw[:100]]
    nonfaces = [area_resize(x) for x in lfw[100:]]

    sources = []
    for name in ("camera", "coins", "moon", "page", "text", "brick", "grass", "gravel", "cell", "horse"):
        img = getattr(data, name)()
        if img.dtype == bool:
            img = img.astype(np.uint8) * 255
        if img.ndim == 3:
            img = luma601(img)
        sources.append(np.asarray(img, dtype=np.uint8))
    for name in ("coffee", "chelsea", "rocket", "immunohistochemistry", "hubble_deep_field"):
        sources.append(luma601(getattr(data, name)()))
    np_rng = np.random.default_rng(args.seed)
    for _ in range(args.crops):
        img = sources[np_rng.integers(len(sources))]
        scale = np_rng.choice([1, 2, 4])
        side = TILE * scale
        if img.shape[0] < side or img.shape[1] < side:
            continue
        y = np_rng.integers(img.shape[0] - side + 1)
        x = np_rng.integers(img.shape[1] - side + 1)
        nonfaces.append(area_resize(img[y:y + side, x:x + side]))

    face_train, face_test, face_collage = split3(faces, args.test_fraction, args.collage_fraction, rng)
    nonface_train, nonface_test = split(nonfaces, args.test_fraction, rng)
    # Only 100 distinct faces: each is expanded to 10 tiles (flip x 5 shifts).
    # Augmented copies of one person never cross a split.
    shifts = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
    out = []
    for part in (face_train, face_test, face_collage):
        part = [a for f in part for a in augment(f, shifts)]
        rng.shuffle(part)
        out.append(part)
    return out[0], out[1], out[2], nonface_train, nonface_test


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", required=True)
    ap.add_argument("--source", choices=["skimage", "real"], default="skimage")
    ap.add_argument("--utk", help="UTKFace image directory (source=real)")
    ap.add_argument("--cifar", help="cifar-10-batches-py directory (source=real)")
    ap.add_argument("--test-fraction", type=float, default=0.3)
    ap.add_argument("--collage-fraction", type=float, default=0.3,
                    help="faces held out for the collage, disjoint from train and test")
    ap.add_argument("--crops", type=int, default=2000, help="extra non-face crops (source=skimage)")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    if args.source == "real":
        if not (args.utk and args.cifar):
            ap.error("--source real needs --utk and --cifar")
        face_train, face_test, face_collage = from_utk(args, rng)
        nonface_train, nonface_test = from_cifar(args, rng)
    else:
        face_train, face_test, face_collage, nonface_train, nonface_test = from_skimage(args, rng)

    dump(os.path.join(args.out, "faces_train"), face_train)
    dump(os.path.join(args.out, "faces_test"), face_test)
    dump(os.path.join(args.out, "faces_collage"), face_collage)
    dump(os.path.join(args.out, "nonfaces_train"), nonface_train)
    dump(os.path.join(args.out, "nonfaces_test"), nonface_test)
    print("faces %d/%d/%d  non-faces %d/%d (train/test/collage, train/test)"
          % (len(face_train), len(face_test), len(face_collage), len(nonface_train), len(nonface_test)))


if __name__ == "__main__":
    main()
