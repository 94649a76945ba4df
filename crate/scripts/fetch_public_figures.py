#!/usr/bin/env python3
"""Fetch a public-figure snapshot from a SPARQL endpoint.

Writes one name per line with `# source:` and `# retrieved:` headers, the
format accepted by the `public_figures` config key.

    PIIGUARD_SPARQL_ENDPOINT=https://query.wikidata.org/sparql \
        python3 scripts/fetch_public_figures.py --min-sitelinks 150 -o figures.txt
"""

import argparse
import datetime
import os
import sys

import requests

DEFAULT_ENDPOINT = "https://query.wikidata.org/sparql"

QUERY = """
SELECT DISTINCT ?label WHERE {{
  ?person wdt:P31 wd:Q5 ;
          wikibase:sitelinks ?links ;
          rdfs:label ?label .
  FILTER(?links >= {min_sitelinks})
  FILTER(LANG(?label) IN ({languages}))
}}
LIMIT {limit}
"""


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min-sitelinks", type=int, default=150)
    ap.add_argument("--languages", default="en,de,fr,es,pt,hi")
    ap.add_argument("--limit", type=int, default=20000)
    ap.add_argument("-o", "--output", default="-")
    args = ap.parse_args()

    endpoint = os.environ.get("PIIGUARD_SPARQL_ENDPOINT", DEFAULT_ENDPOINT)
    languages = ", ".join(f'"{l.strip()}"' for l in args.languages.split(",") if l.strip())
    query = QUERY.format(min_sitelinks=args.min_sitelinks, languages=languages, limit=args.limit)
    resp = requests.get(
        endpoint,
        params={"query": query, "format": "json"},
        headers={"Accept": "application/sparql-results+json", "User-Agent": "piiguard-snapshot/0.1"},
        timeout=300,
    )
    resp.raise_for_status()

    names = set()
    for row in resp.json()["results"]["bindings"]:
        name = " ".join(row["label"]["value"].split())
        if name and not any(ch.isdigit() for ch in name):
            names.add(name)

    retrieved = datetime.date.today().isoformat()
    lines = [f"# source: {endpoint}", f"# retrieved: {retrieved}", *sorted(names)]
    text = "\n".join(lines) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(f"{len(names)} names from {endpoint}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
