#!/usr/bin/env python3
"""Export a GitHub pull request as a JSON document for `piiguard triage-pr`.

Only files added or modified by the PR are exported, at the PR head
revision. Binary files are left out.

    GITHUB_TOKEN=... python3 scripts/export_github_pr.py owner/repo 42 > pr-42.json
    piiguard triage-pr pr-42.json
"""

import argparse
import json
import os
import sys

import requests

API = os.environ.get("GITHUB_API_URL", "https://api.github.com")


def session() -> requests.Session:
    s = requests.Session()
    s.headers["Accept"] = "application/vnd.github+json"
    token = os.environ.get("GITHUB_TOKEN")
    if token:
        s.headers["Authorization"] = f"Bearer {token}"
    return s


def changed_files(s: requests.Session, repo: str, number: int):
    page = 1
    while True:
        r = s.get(f"{API}/repos/{repo}/pulls/{number}/files", params={"per_page": 100, "page": page}, timeout=60)
        r.raise_for_status()
        batch = r.json()
        if not batch:
            return
        yield from batch
        page += 1


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("repo", help="owner/name")
    ap.add_argument("number", type=int)
    args = ap.parse_args()

    s = session()
    files = []
    skipped = 0
    for f in changed_files(s, args.repo, args.number):
        if f["status"] == "removed":
            continue
        raw = s.get(f["raw_url"], timeout=60)
        raw.raise_for_status()
        try:
            content = raw.content.decode("utf-8")
        except UnicodeDecodeError:
            skipped += 1
            continue
        if "\0" in content:
            skipped += 1
            continue
        files.append({"path": f["filename"], "content": content})

    json.dump({"pr_id": f"{args.repo}#{args.number}", "files": files}, sys.stdout, indent=2)
    sys.stdout.write("\n")
    print(f"{len(files)} files exported, {skipped} binary files left out", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
