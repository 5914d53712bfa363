"""Export the star products of all pairs of standard monomials for one orbit."""
from dataclasses import asdict, dataclass

from config import parse_config, write_json

from orbitquant.cli import presentation
from orbitquant.liealg import algebra_by_name
from orbitquant.orbitideal import equivariance_certificate, orbit_from_eigs, parse_eigs
from orbitquant.polyring import CPoly, render_cpoly
from orbitquant.starquant import build_engine, star_value


@dataclass
class StarTableConfig:
    """Star table for one orbit, engine degree and lift."""
    algebra: str = "sl2"
    eigs: str = "1,-1"
    deg: int = 4
    lift: str = "weyl"
    mode: str = "standard-monomial"
    slack: int = 0
    out: str = "results/star_table.json"


def main(cfg: StarTableConfig):
    alg = algebra_by_name(cfg.algebra)
    spec = orbit_from_eigs(alg, parse_eigs(cfg.eigs))
    pres = presentation(spec)
    eng = build_engine(alg, pres, equivariance_certificate(pres), cfg.deg, lift=cfg.lift,
                       slack=cfg.slack)
    mons = [CPoly.monomial(m) for m in eng.std.monomials]
    show = lambda p: render_cpoly(p, alg.variables)  # noqa: E731
    rows = [{"f": show(f), "g": show(g), "result": show(star_value(eng, f, g, cfg.mode))}
            for f in mons for g in mons if f.degree() + g.degree() <= cfg.deg]
    path = write_json(cfg.out, {"config": asdict(cfg), "engine": eng.metadata(),
                                "rank_by_degree": eng.rank_by_degree, "table": rows})
    print(f"{len(rows)} products written to {path}")


if __name__ == "__main__":
    main(parse_config(StarTableConfig))
