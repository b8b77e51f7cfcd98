#!/usr/bin/env python3
"""Build the public-domain English evaluation corpus.

Sources (both public domain, fetched as npm tarballs):
  * kjv@1.0.0                          King James Bible, 1769 text
  * websters-english-dictionary@2.0.0  Webster's Unabridged Dictionary (1913)

Output: one paragraph per line, UTF-8, gzip-compressed.

Usage: scripts/build_english_corpus.py OUT.txt.gz
"""
import gzip
import json
import os
import re
import subprocess
import sys
import tarfile
import tempfile

PACKAGES = ["kjv@1.0.0", "websters-english-dictionary@2.0.0"]


def fetch(workdir):
    for pkg in PACKAGES:
        subprocess.run(["npm", "pack", pkg], cwd=workdir, check=True,
                       stdout=subprocess.DEVNULL)
    for name in os.listdir(workdir):
        if name.endswith(".tgz"):
            dest = os.path.join(workdir, name[:-4])
            with tarfile.open(os.path.join(workdir, name)) as tar:
                tar.extractall(dest)


def bible_lines(root):
    path = os.path.join(root, "kjv-1.0.0", "package", "json", "verses-1769.json")
    with open(path, encoding="utf-8") as fh:
        verses = json.load(fh)
    for text in verses.values():
        text = text.replace("[", "").replace("]", "").lstrip("# ").strip()
        if text:
            yield text


def dictionary_lines(root):
    path = os.path.join(root, "websters-english-dictionary-2.0.0", "package",
                        "dictionary.json")
    with open(path, encoding="utf-8") as fh:
        entries = json.load(fh)
    # Every third headword in sorted order keeps the corpus near 11 MB
    # without an alphabetical bias.
    for i, word in enumerate(sorted(entries)):
        if i % 3 != 0:
            continue
        text = re.sub(r"\s+", " ", entries[word]).strip()
        if text:
            yield f"{word.capitalize()}. {text}"


def main():
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    with tempfile.TemporaryDirectory() as workdir:
        fetch(workdir)
        lines = list(bible_lines(workdir)) + list(dictionary_lines(workdir))
    data = ("\n".join(lines) + "\n").encode("utf-8")
    with gzip.GzipFile(sys.argv[1], "wb", mtime=0) as out:
        out.write(data)
    print(f"{len(lines)} lines, {len(data)} bytes", file=sys.stderr)


if __name__ == "__main__":
    main()
