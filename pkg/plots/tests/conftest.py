import numpy as np
import pytest

CONTRACTS = ("f2da", "s2da", "f2di", "s2di")
MEASURES = ("mean", "var0.99", "es0.975")


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(str(x) for x in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@pytest.fixture
def artifact_dir(tmp_path):
    """A small, schema-complete artifact directory with consistent numbers."""
    rng = np.random.default_rng(0)
    sweep = []
    hlines = []
    for contract in CONTRACTS:
        for measure in MEASURES:
            ref = 10.0 + rng.uniform(0.0, 1.0)
            for norm in ("l1", "linf"):
                for i, eps in enumerate((0.0, 0.05, 0.1)):
                    lower = ref - 0.4 * i
                    upper = ref + 0.5 * i
                    sweep.append((contract, measure, norm, eps, lower, upper))
            hlines.append((contract, measure, "cref", ref))
            hlines.append((contract, measure, "pi", ref - 0.1))
            for band in ("fh", "tau", "tankov"):
                hlines.append((contract, measure, f"{band}_lower", ref - 1.0))
                hlines.append((contract, measure, f"{band}_upper", ref + 1.0))
    write_csv(tmp_path / "sweep.csv",
              ("contract", "measure", "norm", "epsilon", "lower", "upper"),
              sweep)
    write_csv(tmp_path / "hlines.csv",
              ("contract", "measure", "label", "value"), hlines)

    rcurve = []
    for contract in CONTRACTS:
        for copula in ("cref", "pi", "w", "m"):
            base = rng.uniform(0.2, 0.9)
            for m in range(1, 6):
                rcurve.append((contract, copula, m, round(base / m, 6)))
    write_csv(tmp_path / "rcurve.csv", ("contract", "copula", "m", "r_m"),
              rcurve)

    for contract in CONTRACTS:
        payoffs = rng.gamma(4.0, 2.5, size=400)
        write_csv(tmp_path / f"samples_{contract}.csv", ("payoff",),
                  [(round(p, 6),) for p in payoffs])

    write_csv(tmp_path / "calibration.csv",
              ("contract", "level", "price_at_pi"),
              [(c, 1.0, 16.9) for c in CONTRACTS])
    return tmp_path
