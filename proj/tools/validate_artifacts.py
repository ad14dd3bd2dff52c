#!/usr/bin/env python3
"""Runs every CLI subcommand that writes JSON and validates the output
against docs/schemas. Usage: validate_artifacts.py <schreier-binary> <schema-dir>"""

import itertools
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

SCHEMA_OF = {
    "schreier member": "member",
    "schreier enum": "enum",
    "schreier count": "count",
    "game play": "game_play",
    "game solve": "game_solve",
    "game verify": "game_verify",
    "spreadmap build": "spreadmap_build",
    "spreadmap verify": "spreadmap_verify",
    "embed build": "embedding_certificate",
    "embed verify": "embed_verify",
    "dichotomy run": "dichotomy_certificate",
    "example amt": "example",
    "cb rank": "rank",
    "cb index": "index",
}


def main():
    binary, schema_dir = sys.argv[1], Path(sys.argv[2])
    schemas = {p.name.removesuffix(".schema.json"): json.loads(p.read_text())
               for p in schema_dir.glob("*.schema.json")}
    for s in schemas.values():
        jsonschema.Draft202012Validator.check_schema(s)

    tmp = Path(tempfile.mkdtemp(prefix="schreier-schema-"))
    (tmp / "fam.txt").write_text("{}\n1\n2\n1,2\n3\n4\n3,4\n")
    pairs = ["{}"] + [str(a) for a in range(1, 9)] + [f"{a},{b}" for a, b in itertools.combinations(range(1, 9), 2)]
    (tmp / "pairs.txt").write_text("\n".join(pairs) + "\n")

    runs = [
        ("schreier member --alpha w --set 3,4,5", None),
        ("schreier enum --alpha 1 --universe 6 --maximal", None),
        ("schreier count --spec 0,1 --universe 8", None),
        ("game play --spec 1 --family s:1 --universe 6 --machine S", "1\n"),
        ("game play --spec 1,1 --family s:1 --universe 6 --machine N", "2\n3,4,5\n"),
        (f"game solve --spec 1,1 --family s:1 --universe 8 --out {tmp}/s.json", None),
        ("game verify --spec 1,1 --family s:1 --universe 8 --policy minlast", None),
        ("game verify --spec 1,1 --family s:1 --universe 8 --policy const:1", None),
        (f"game verify --spec 1,1 --family s:1 --universe 8 --strategy {tmp}/s.json", None),
        (f"spreadmap build --spec w --policy const:2 --budget 7 --out {tmp}/m.json", None),
        (f"spreadmap build --spec 1,1 --strategy {tmp}/s.json --budget 6", None),
        (f"spreadmap verify --map {tmp}/m.json", None),
        (f"spreadmap verify --map {tmp}/m.json --spec 1 --policy const:8 --budget 7", None),
        (f"embed build --family file:{tmp}/fam.txt --spec 1 --universe 4 --out {tmp}/c.json", None),
        (f"embed build --family file:{tmp}/fam.txt --spec 1 --universe 4 --policy const:1", None),
        (f"embed verify --cert {tmp}/c.json", None),
        ("dichotomy run --family random:3 --spec 1 --universe 10 --depth 2", None),
        (f"dichotomy run --family file:{tmp}/pairs.txt --spec 1 --universe 8 --min-length 8", None),
        ("example amt --kmax 2", None),
        ("example amt --kmax 3 --check", None),
        ("example amt --kmax 4 --m 3,5,7,9,11,13,15,17,19,21 --check", None),
        ("cb rank --family s:2 --set 3", None),
        ("cb rank --family s:1 --set 2,3,4", None),
        ("cb index --family spread:1,2;4", None),
    ]
    failures = 0
    for i, (args, stdin) in enumerate(runs):
        if "--out" not in args:
            args += f" --out {tmp}/a{i}.json"
        subprocess.run([binary, *args.split()], input=stdin, capture_output=True, text=True)
        path = Path(args.split("--out ")[1].split()[0])
        try:
            doc = json.loads(path.read_text())
            schema = schemas[SCHEMA_OF[doc["command"]]]
            jsonschema.validate(doc, schema)
            print(f"ok    {args}")
        except Exception as e:  # noqa: BLE001
            failures += 1
            print(f"FAIL  {args}: {str(e).splitlines()[0]}")
    strat = json.loads((tmp / "s.json").read_text())
    try:
        jsonschema.validate({k: v for k, v in strat.items()
                             if k in schemas["strategy"]["properties"]}, schemas["strategy"])
        print("ok    strategy file body")
    except jsonschema.ValidationError as e:
        failures += 1
        print(f"FAIL  strategy file body: {e.message}")
    print(f"{failures} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
