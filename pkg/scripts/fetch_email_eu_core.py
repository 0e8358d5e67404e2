#!/usr/bin/env python3
"""Download the email-Eu-core graph and department labels into data/.

The acceptance tests that reproduce published point values need these two
files; they skip when the files are absent.
"""

import gzip
import shutil
import sys
import urllib.request
from pathlib import Path

FILES = {
    "email-Eu-core.txt.gz":
        "https://snap.stanford.edu/data/email-Eu-core.txt.gz",
    "email-Eu-core-department-labels.txt.gz":
        "https://snap.stanford.edu/data/email-Eu-core-department-labels.txt.gz",
}


def main() -> int:
    data = Path(__file__).resolve().parent.parent / "data"
    data.mkdir(exist_ok=True)
    for name, url in FILES.items():
        out = data / name[:-3]
        if out.exists():
            print(f"{out} already present")
            continue
        gz = data / name
        print(f"fetching {url}")
        urllib.request.urlretrieve(url, gz)
        with gzip.open(gz, "rb") as src, open(out, "wb") as dst:
            shutil.copyfileobj(src, dst)
        gz.unlink()
        print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
