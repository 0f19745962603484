#!/usr/bin/env python3
"""Materialize MovieLens-100K as data/ml-100k/u.data.

Tries the GroupLens archive first; falls back to the copy bundled in the
pytorch-widedeep wheel (fetched with `pip download`), which carries the
same 100,000 rows.
"""
import glob
import io
import os
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
OUT = os.path.join(ROOT, "data", "ml-100k", "u.data")
URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"


def from_grouplens():
    with urllib.request.urlopen(URL, timeout=20) as resp:
        archive = zipfile.ZipFile(io.BytesIO(resp.read()))
    return archive.read("ml-100k/u.data")


def from_wheel():
    import pandas as pd

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", tmp,
             "pytorch-widedeep==1.7.0"],
            check=True,
        )
        wheel = zipfile.ZipFile(glob.glob(os.path.join(tmp, "*.whl"))[0])
        raw = wheel.read("pytorch_widedeep/datasets/data/MovieLens100k_data.parquet.brotli")
    df = pd.read_parquet(io.BytesIO(raw))
    lines = (
        f"{u}\t{i}\t{r}\t{t}\n"
        for u, i, r, t in df[["user_id", "movie_id", "rating", "timestamp"]].itertuples(index=False)
    )
    return "".join(lines).encode()


def main():
    if os.path.exists(OUT):
        print(f"{OUT} already present")
        return
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    try:
        data = from_grouplens()
    except Exception as exc:  # noqa: BLE001
        print(f"grouplens download failed ({exc}); using wheel copy", file=sys.stderr)
        data = from_wheel()
    with open(OUT, "wb") as fh:
        fh.write(data)
    rows = data.count(b"\n")
    print(f"wrote {OUT} ({rows} rows)")


if __name__ == "__main__":
    main()
