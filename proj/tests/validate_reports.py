"""Runs every panelfuse command once and validates each JSON document it
writes against the shipped report schema."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def main(tool: str, schema_path: str) -> int:
    schema = json.loads(pathlib.Path(schema_path).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    with tempfile.TemporaryDirectory() as tmp:
        root = pathlib.Path(tmp)

        def run(*args, expect=0):
            proc = subprocess.run([tool, *args], capture_output=True, text=True)
            if proc.returncode != expect:
                print(f"{' '.join(args)}: exit {proc.returncode}\n{proc.stderr}")
                sys.exit(1)
            return proc

        run("simulate", "--dgp", "dgp2", "--n", "10", "--t", "4", "--sigma2", "0.1",
            "--out", str(root / "sim"))
        panel = str(root / "sim" / "panel.csv")
        run("fit", "--input", panel, "--lambda", "0.8", "--gamma", "0.8", "--out", str(root / "fit"))
        run("tune", "--input", panel, "--out", str(root / "tune"))
        n_blocks = json.loads((root / "tune" / "tune.json").read_text())["partition"]["n_blocks"]
        contrast = ",".join("1" if k == 1 else "0" for k in range(2 * n_blocks))
        run("test", "--fit", str(root / "tune" / "tune.json"), "--contrast", contrast,
            "--out", str(root / "test"))
        run("replicate", "--dgp", "dgp2", "--n", "10", "--t", "4", "--replicates", "2",
            "--out", str(root / "rep"))
        bad = run("simulate", "--dgp", "dgp2", "--n", "15", "--out", str(root / "bad"), expect=1)

        documents = sorted(root.rglob("*.json"))
        documents_text = [(p, p.read_text()) for p in documents]
        documents_text.append((pathlib.Path("stderr"), bad.stderr))
        failures = 0
        for path, text in documents_text:
            errors = list(validator.iter_errors(json.loads(text)))
            status = "ok" if not errors else "INVALID"
            print(f"{status} {path.relative_to(root) if path.is_absolute() else path}")
            for e in errors[:3]:
                print(f"  {e.json_path}: {e.message}")
            failures += bool(errors)
        expected = {"sim/truth.json", "fit/fit.json", "tune/tune.json", "test/test.json",
                    "rep/aggregate.json", "bad/error.json"}
        missing = expected - {str(p.relative_to(root)) for p in documents}
        if missing:
            print(f"missing documents: {sorted(missing)}")
            failures += 1
        return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
