"""Builds the extension module with cargo, imports it, and exercises each binding."""

import math
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    subprocess.run(["cargo", "build", "--release", "-p", "pycritreg"], cwd=ROOT, check=True)
    lib = ROOT / "target" / "release" / "libpycritreg.so"
    dest = pathlib.Path(tempfile.mkdtemp()) / "pycritreg.so"
    shutil.copy(lib, dest)
    sys.path.insert(0, str(dest.parent))
    import pycritreg

    return pycritreg


def main():
    m = load_module()

    gens = m.thompson_generators()
    assert m.pl_eval(gens["A"], "1/2") == "1/4"
    assert m.pl_support(gens["B"]) == [("1/2", "1/1")]

    crossed = (ROOT / "data" / "crossed.act").read_text()
    chain = m.find_two_chain(crossed, 3)
    assert chain is not None and chain[0] == "(0/1, 3/4)", chain

    accepted, failure, total = m.verify_witness(m.translation_witness(12), 12)
    assert accepted and failure is None and 0 < total < 1

    assert m.min_k_for_tau(0.5) == 4
    assert m.k_tau_lower_bound(0.5) == 3

    xs = [i / 1000 for i in range(1001)]
    value, _, _ = m.holder_norm(xs, [math.sqrt(x) for x in xs], 0.5)
    assert value >= 0.99

    params = m.find_feasible(0.5)
    assert params is not None
    assert abs(m.sup_tau(1e-3) - (math.sqrt(5) - 1) / 2) < 1e-3
    assert m.find_feasible(0.7) is None

    mean, top, err = m.omega_monte_carlo(0.5, 200, 2000, 7)
    partial, closed = m.expectation_bound(2, 0.5, 200)
    assert abs(closed - 1 / (math.sqrt(2) - 1)) < 1e-12
    assert mean <= partial + 3 * err
    assert m.omega_monte_carlo(0.5, 200, 2000, 7) == (mean, top, err)

    assert m.tsuboi_max_deviation(0.5, 6, 200) <= 1e-9

    try:
        m.pl_eval([("0", "0"), ("1/2", "3/4"), ("1/4", "1/4"), ("1", "1")], "1/2")
    except ValueError:
        pass
    else:
        raise AssertionError("non-monotone breakpoints accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
