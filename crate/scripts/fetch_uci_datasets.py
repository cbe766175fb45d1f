#!/usr/bin/env python3
"""Fetch the UCI glass and breast-tissue datasets and convert them to the
CSV layout this repo uses (numeric feature columns + one label column,
header row, comma separators).

Requires network access to archive.ics.uci.edu. The wine dataset is
already committed (data/uci/wine.csv, exported from scikit-learn's
bundled copy of the same UCI data).

Usage:  python3 scripts/fetch_uci_datasets.py [out_dir]
"""

import csv
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

UCI = "https://archive.ics.uci.edu/static/public"


def fetch(url: str) -> bytes:
    print(f"fetching {url}")
    with urllib.request.urlopen(url) as resp:
        return resp.read()


def write_glass(out_dir: Path) -> None:
    # Glass Identification: id + 9 features + type (1-7, 4 unused).
    raw = fetch(f"{UCI}/42/glass+identification.zip")
    with zipfile.ZipFile(io.BytesIO(raw)) as zf:
        data = zf.read("glass.data").decode("utf-8")
    rows = [line.split(",") for line in data.strip().splitlines()]
    out = out_dir / "glass.csv"
    with out.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["ri", "na", "mg", "al", "si", "k", "ca", "ba", "fe", "class"])
        for row in rows:
            # drop the id column, keep the type as label
            w.writerow(row[1:10] + [f"type_{row[10]}"])
    print(f"wrote {out} ({len(rows)} rows)")


def write_breast_tissue(out_dir: Path) -> None:
    # Breast Tissue: xlsx with a Data sheet; 9 features, 6 classes.
    try:
        import openpyxl  # noqa: F401
        import pandas as pd
    except ImportError:
        sys.exit("breast tissue conversion needs pandas + openpyxl")
    raw = fetch(f"{UCI}/192/breast+tissue.zip")
    with zipfile.ZipFile(io.BytesIO(raw)) as zf:
        name = next(n for n in zf.namelist() if n.lower().endswith(".xls") or n.lower().endswith(".xlsx"))
        frame = pd.read_excel(io.BytesIO(zf.read(name)), sheet_name="Data")
    frame = frame.drop(columns=["Case #"], errors="ignore")
    label = frame.pop("Class")
    frame["class"] = label
    out = out_dir / "breast_tissue.csv"
    frame.to_csv(out, index=False)
    print(f"wrote {out} ({len(frame)} rows)")


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data/uci")
    out_dir.mkdir(parents=True, exist_ok=True)
    write_glass(out_dir)
    write_breast_tissue(out_dir)


if __name__ == "__main__":
    main()
