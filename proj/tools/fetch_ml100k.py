#!/usr/bin/env python3
"""Fetch the MovieLens-100k ratings file into data/ml-100k/u.data.

The GroupLens host is tried first. When it is unreachable, the copy bundled in
the RecBole wheel (recbole/dataset_example/ml-100k/ml-100k.inter, same rows as
u.data plus a header line) is pulled through pip and converted.
"""
import argparse
import glob
import io
import os
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

GROUPLENS_URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
RECBOLE_MEMBER = "recbole/dataset_example/ml-100k/ml-100k.inter"
RECBOLE_ITEMS = "recbole/dataset_example/ml-100k/ml-100k.item"


def from_grouplens(out_dir):
    with urllib.request.urlopen(GROUPLENS_URL, timeout=20) as resp:
        archive = zipfile.ZipFile(io.BytesIO(resp.read()))
    with open(os.path.join(out_dir, "u.data"), "wb") as f:
        f.write(archive.read("ml-100k/u.data"))
    with open(os.path.join(out_dir, "u.item"), "wb") as f:
        f.write(archive.read("ml-100k/u.item"))


def from_recbole(out_dir):
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q",
             "-d", tmp, "recbole==1.2.1"],
            check=True)
        wheel = zipfile.ZipFile(glob.glob(os.path.join(tmp, "recbole-*.whl"))[0])
        lines = wheel.read(RECBOLE_MEMBER).decode().splitlines()[1:]
        with open(os.path.join(out_dir, "u.data"), "w") as f:
            for line in lines:
                user, item, rating, ts = line.split("\t")
                f.write(f"{user}\t{item}\t{int(float(rating))}\t{int(float(ts))}\n")
        # id<TAB>title, used as optional labels
        items = wheel.read(RECBOLE_ITEMS).decode().splitlines()[1:]
        with open(os.path.join(out_dir, "titles.tsv"), "w") as f:
            for line in items:
                cols = line.split("\t")
                f.write(f"{cols[0]}\t{cols[1]}\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "..", "data", "ml-100k"))
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)
    try:
        from_grouplens(args.out)
        print("fetched from grouplens")
    except Exception as exc:  # noqa: BLE001
        print(f"grouplens unavailable ({exc}); using the recbole wheel copy")
        from_recbole(args.out)
    count = sum(1 for _ in open(os.path.join(args.out, "u.data")))
    print(f"{count} ratings in {os.path.join(args.out, 'u.data')}")


if __name__ == "__main__":
    main()
