"""The command line pipeline on a small configuration.

Writes a YAML config, runs ``pipeline`` twice (the second run is served from
the cache) and validates the free-space identity.
"""
import sys
import tempfile
from pathlib import Path

from passive_lsm import config
from passive_lsm.cli import main

root = Path(sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp())
cfg = config.loads("""
scene: {obstacles: [{shape: kite}]}
time: {T: 8.0}
sources: {L: 20}
operator: {kind: C, n_op: 30}
grid: {spacing: 0.1}
""").override(output=str(root / "runs"))
config.save(cfg, root / "small.yaml")
print(config.dumps(cfg))

for attempt in (1, 2):
    print(f"pipeline run {attempt}:")
    main(["pipeline", "--config", str(root / "small.yaml")])
print("\nvalidate:")
code = main(["validate", "--identity", "free", "--k", "4", "--R", "20", "40"])
print("exit code", code)
