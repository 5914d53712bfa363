"""Run the full check suite over a matrix of orbits and lifts.

Each row is one ``oq check`` run.  The summary shows the number of passing
checks and the first failing check name, and the raw results go to JSON.
"""
import time
from dataclasses import asdict, dataclass, field

from config import parse_config, write_json

from orbitquant.cli import build_parser, make_context, run_suite, _need_orbit

DEFAULT_RUNS = [
    "sl2 1,-1 4 weyl",
    "sl3 1,0,-1 3 weyl",
    "sl3 1:2,-2:1 3 weyl",
    "sl3 1:2,-2:1 3 shifted",
    "sl3 2:1,-1:2 3 shifted",
]


@dataclass
class MatrixConfig:
    """Each run is 'algebra eigs degree lift'."""
    runs: list = field(default_factory=lambda: list(DEFAULT_RUNS))
    trials: int = 20
    seed: int = 0
    out: str = "results/verify_matrix.json"


def run_one(line: str, cfg: MatrixConfig):
    algebra, eigs, deg, lift = line.split()
    args = build_parser().parse_args(
        ["check", "--algebra", algebra, f"--eigs={eigs}", "--deg", deg, "--lift", lift,
         "--trials", str(cfg.trials), "--seed", str(cfg.seed)])
    ctx = make_context(args)
    _need_orbit(ctx)
    t0 = time.perf_counter()
    results = run_suite(ctx, int(deg))
    return {"run": line, "seconds": round(time.perf_counter() - t0, 2),
            "results": [{"name": r.name, "passed": r.passed, "count": r.count,
                         "witness": r.witness} for r in results]}


def main(cfg: MatrixConfig):
    rows = []
    for line in cfg.runs:
        row = run_one(line, cfg)
        rows.append(row)
        res = row["results"]
        bad = [r["name"] for r in res if not r["passed"]]
        first = bad[0] if bad else "-"
        print(f"{line:28s} {len(res) - len(bad):3d}/{len(res):<3d} "
              f"{row['seconds']:7.2f}s  first failure: {first}")
    print(f"written to {write_json(cfg.out, {'config': asdict(cfg), 'rows': rows})}")


if __name__ == "__main__":
    main(parse_config(MatrixConfig))
