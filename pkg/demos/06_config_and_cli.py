"""
Config files and the command line
=================================

Scenarios can live in TOML files with unit-suffixed keys; the same files
drive the ``lambda-imprint`` command.
"""
import pathlib
import tempfile

from lambda_imprint import config_hash, load_config, serialize_config
from lambda_imprint.cli import main

here = pathlib.Path(__file__).parent
cfg = load_config(here / "configs" / "displace.toml")
print(cfg.case.value, [type(e).__name__ for e in cfg.sequence], cfg.grid())
print("hash", config_hash(cfg)[:16])
print(serialize_config(cfg)[:200], "...")

with tempfile.TemporaryDirectory() as out:
    status = main(["run", str(here / "configs" / "displace.toml"), "--out", out])
    print("exit status", status, sorted(p.name for p in pathlib.Path(out).iterdir()))
    status = main(["sweep", str(here / "configs" / "tau_b_sweep.toml"), "--out", out])
    print((pathlib.Path(out) / "tau_b_sweep.csv").read_text())

# Same thing from a shell:
#   lambda-imprint run demos/configs/displace.toml --out results/displace
#   lambda-imprint sweep demos/configs/tau_b_sweep.toml --workers 2
#   lambda-imprint reproduce table1 --out results/table1
#   lambda-imprint check
