"""Runs each CLI subcommand and validates its JSON report against report.schema.json."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

RUNS = [
    ["verify", "--d", "3", "--p", "2", "--lambda", "1", "--u0", "1"],
    ["verify", "--d", "5", "--p", "2", "--lambda", "1", "--singular"],
    ["verify", "--d", "3", "--p", "0", "--lambda", "2", "--u0", "1", "--inject-perturbation", "0.1"],
    ["constants", "--d", "3", "--p", "1", "--lambda", "1"],
    ["constants", "--d", "4", "--p", "1.5", "--lambda", "2"],
    ["constants", "--d", "3", "--p", "4", "--lambda", "1"],
    ["solve", "--d", "3", "--p", "0", "--lambda", "2", "--u0", "1", "--r-max", "5", "--format", "json"],
    ["solve", "--d", "5", "--p", "2", "--lambda", "1", "--singular", "--format", "json"],
    ["q0-scan"],
    ["sweep", "--ds", "3,4", "--ps", "0.5,2", "--lambdas", "1", "--u0s", "1", "--scales", "0.5,1"],
]


def main() -> int:
    cli, schema_path = sys.argv[1], pathlib.Path(sys.argv[2])
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    bad = 0
    with tempfile.TemporaryDirectory() as tmp:
        for i, args in enumerate(RUNS):
            out = pathlib.Path(tmp) / f"report{i}.json"
            proc = subprocess.run([cli, *args, "--out", str(out)], capture_output=True, text=True)
            if proc.returncode not in (0, 1):
                print(f"FAIL {' '.join(args)}: exit {proc.returncode}: {proc.stderr.strip()}")
                bad += 1
                continue
            report = json.loads(out.read_text())
            error = jsonschema.exceptions.best_match(validator.iter_errors(report))
            if error is None:
                print(f"ok   {' '.join(args)}")
                continue
            # the top-level oneOf hides the cause; report the deepest branch error
            while error.context:
                error = jsonschema.exceptions.best_match(error.context)
            print(f"FAIL {' '.join(args)}: {list(error.absolute_path)}: {error.message[:200]}")
            bad += 1
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
