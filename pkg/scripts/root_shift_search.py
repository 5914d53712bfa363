"""Search over h-shifts of the minimal-polynomial roots for a non-regular orbit.

The lift uses the entries of prod_j (A - a_j - c_j h) computed in U_h.  For
every grid point (c_1, ..., c_k) the engine is built without stopping at the
first violation; a point is flat when there are no violations and the rank
identity holds.  The script then reports which flat points satisfy
sum_j m_j c_j = -e_2(m), with m the multiplicities in decreasing eigenvalue
order.
"""
import itertools
from dataclasses import asdict, dataclass

from config import parse_config, write_json

from orbitquant.exactnum import HPoly
from orbitquant.liealg import algebra_by_name
from orbitquant.orbitideal import (
    equivariance_certificate, minimalpoly_generators, orbit_from_eigs, parse_eigs)
from orbitquant.starquant import build_engine, lift_ideal


@dataclass
class SearchConfig:
    algebra: str = "sl3"
    eigs: str = "1:2,-2:1"
    deg: int = 3
    grid: int = 3  # c_j ranges over -grid..grid
    out: str = "results/root_shift_search.json"


def main(cfg: SearchConfig):
    alg = algebra_by_name(cfg.algebra)
    spec = orbit_from_eigs(alg, parse_eigs(cfg.eigs))
    pres = minimalpoly_generators(spec, augment=False)
    cert = equivariance_certificate(pres)
    eigs = sorted(spec.eigenvalues, key=lambda vm: vm[0], reverse=True)
    mult = [m for _, m in eigs]
    e2 = sum(a * b for a, b in itertools.combinations(mult, 2))
    rows = []
    for c in itertools.product(range(-cfg.grid, cfg.grid + 1), repeat=len(eigs)):
        roots = [HPoly([v, cj]) for (v, _), cj in zip(eigs, c)]
        lifted = lift_ideal(pres, cert, "shifted", roots=roots)
        eng = build_engine(alg, pres, cert, cfg.deg, lifted=lifted, strict=False)
        flat = not eng.violations and eng.rank_identity_holds()
        on_line = sum(m * cj for m, cj in zip(mult, c)) == -e2
        rows.append({"c": list(c), "flat": flat, "on_line": on_line,
                     "rank_by_degree": eng.rank_by_degree,
                     "violations": len(eng.violations)})
        print(f"c={c}: flat={flat} on_line={on_line} ranks={eng.rank_by_degree}")
    flat = [r for r in rows if r["flat"]]
    agree = all(r["flat"] == r["on_line"] for r in rows)
    print(f"{len(flat)} flat of {len(rows)}; flat exactly on the line: {agree}")
    write_json(cfg.out, {"config": asdict(cfg), "multiplicities": mult, "e2": e2,
                         "rows": rows, "flat_iff_on_line": agree})


if __name__ == "__main__":
    main(parse_config(SearchConfig))
