#!/usr/bin/env python3
"""Regenerates the CSV files under data/.

iris and cancer come straight from scikit-learn. pathbased, aggregation and
flame are seeded geometric stand-ins for the classic clustering-shape
datasets of the same names: a ring enclosing two blobs, seven blobs of mixed
sizes with thin bridges, and a crescent with a compact blob above it.
"""

import argparse
import os

import numpy as np


def write_csv(path, points, labels):
    d = points.shape[1]
    header = ",".join([f"x{i}" for i in range(d)] + ["label"])
    rows = np.column_stack([points, labels])
    fmt = ["%.10g"] * d + ["%d"]
    np.savetxt(path, rows, delimiter=",", header=header, comments="", fmt=fmt)
    print(f"wrote {path}: n={len(points)} d={d} k={len(set(labels.tolist()))}")


def gen_pathbased(seed=11):
    rng = np.random.default_rng(seed)
    # open ring around two compact blobs
    t = rng.uniform(-0.18 * np.pi, 1.18 * np.pi, 100)
    radius = rng.normal(10.0, 0.45, 100)
    ring = np.column_stack([15.0 + radius * np.cos(t), 13.0 + radius * np.sin(t)])
    blob1 = rng.normal([11.0, 11.0], 1.35, size=(100, 2))
    blob2 = rng.normal([19.0, 11.0], 1.35, size=(100, 2))
    points = np.vstack([blob1, blob2, ring])
    labels = np.repeat([0, 1, 2], 100)
    return points, labels


def gen_aggregation(seed=5):
    rng = np.random.default_rng(seed)
    blobs = [
        ((6.0, 12.0), 1.5, 45),
        ((9.0, 23.0), 2.1, 165),
        ((20.5, 25.0), 1.9, 102),
        ((30.0, 9.0), 2.6, 268),
        ((24.5, 4.5), 1.2, 34),
        ((32.5, 21.5), 1.9, 130),
        ((13.0, 5.0), 1.4, 34),
    ]
    chunks = []
    labels = []
    for idx, (center, sd, count) in enumerate(blobs):
        chunks.append(rng.normal(center, sd, size=(count, 2)))
        labels.extend([idx] * count)
    # thin bridges: a few points between blob 1 and 2, and between 4 and 5,
    # assigned to the larger blob on each bridge
    bridge1 = np.column_stack([
        np.linspace(6.8, 8.6, 5) + rng.normal(0, 0.15, 5),
        np.linspace(14.0, 20.5, 5) + rng.normal(0, 0.15, 5),
    ])
    chunks.append(bridge1)
    labels.extend([1] * 5)
    bridge2 = np.column_stack([
        np.linspace(25.5, 28.0, 5) + rng.normal(0, 0.15, 5),
        np.linspace(5.2, 7.3, 5) + rng.normal(0, 0.15, 5),
    ])
    chunks.append(bridge2)
    labels.extend([3] * 5)
    return np.vstack(chunks), np.asarray(labels)


def gen_flame(seed=3):
    rng = np.random.default_rng(seed)
    # lower crescent opening upward
    t = rng.uniform(0.10 * np.pi, 0.90 * np.pi, 153)
    radius = rng.normal(6.3, 0.55, 153)
    crescent = np.column_stack([7.0 + radius * np.cos(t), 21.0 - radius * np.sin(t)])
    blob = rng.normal([7.2, 20.3], [1.9, 1.5], size=(87, 2))
    points = np.vstack([crescent, blob])
    labels = np.asarray([0] * 153 + [1] * 87)
    return points, labels


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out-dir", default="data")
    args = parser.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)

    from sklearn.datasets import load_breast_cancer, load_iris

    iris = load_iris()
    write_csv(os.path.join(args.out_dir, "iris.csv"), iris.data, iris.target)
    cancer = load_breast_cancer()
    write_csv(os.path.join(args.out_dir, "cancer.csv"), cancer.data, cancer.target)

    points, labels = gen_pathbased()
    write_csv(os.path.join(args.out_dir, "pathbased.csv"), points, labels)
    points, labels = gen_aggregation()
    write_csv(os.path.join(args.out_dir, "aggregation.csv"), points, labels)
    points, labels = gen_flame()
    write_csv(os.path.join(args.out_dir, "flame.csv"), points, labels)


if __name__ == "__main__":
    main()
