"""Smoke test for the `blowup` extension module.

    cd crates/python && maturin build --release -o /tmp/wheels
    pip install /tmp/wheels/blowup-*.whl
    python3 python/smoke_test.py
"""

import math
import os
import tempfile

import blowup


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    grid = blowup.Grid(50.0, 1024)
    prop = blowup.Propagator(grid)

    # waists matched to the nu = 1/3 packet at a tenth of peak density
    sg0 = blowup.matched_gaussian_width(1.0 / 3.0)
    close(sg0 ** 2, (10 * math.sqrt(10) - 1) / (2 * math.log(10)), 1e-12)
    plus, minus = blowup.waist_solutions(sg0)
    close(plus * minus, 0.5, 1e-12)

    g = blowup.Packet.gaussian(1.0)
    psi0 = g.sample(grid)
    close(psi0.norm(), 1.0, 1e-12)
    for t in (0.5, 1.0, 2.0):
        num = prop.evolve(psi0, t).amplitudes()
        exact = g.analytic(grid, t).amplitudes()
        err = max(abs(a - b) for a, b in zip(num, exact))
        assert err < 1e-8, err

    series = prop.evolve_series(psi0, [0.0, 0.5, 1.0])
    assert [f.time for f in series] == [0.0, 0.5, 1.0]
    m = series[-1].moments()
    close(m["norm"], 1.0, 1e-10)
    close(m["mean"], 0.0, 1e-10)

    lo, hi = series[-1].fwhm()
    close(hi - lo, 2 * math.sqrt(2 * math.log(2)), grid.spacing)

    k, rho_k = prop.momentum_density(psi0)
    close(sum(rho_k) * (k[1] - k[0]), 1.0, 1e-10)

    back = blowup.Field.from_bytes(series[1].to_bytes())
    assert back.time == 0.5 and back.amplitudes() == series[1].amplitudes()

    seeds = blowup.seed_positions(5, 2.0)
    traj = prop.trajectories(blowup.Packet.gaussian(minus).sample(grid), seeds, 0.0, 2.0, 1e-3)
    assert len(traj["positions"]) == 5 and set(traj["status"]) == {"ok"}
    spec = blowup.Packet.gaussian(minus)
    width = lambda t: abs(spec.analytic(grid, t).moments()["variance"]) ** 0.5
    for x0, path in zip(seeds, traj["positions"]):
        expected = x0 * width(2.0) / width(0.0)
        close(path[-1], expected, 1e-3 * max(1.0, abs(expected)))

    assert blowup.classify(0.3) == ("singular", False, False)
    assert blowup.classify(0.8) == ("bounded", True, True)

    singular = blowup.Packet.truncated_singular(1.0 / 3.0, 22.5)
    assert singular.kind == "truncated_singular" and singular.focus_time == 1.0

    try:
        blowup.Grid(50.0, 1000)
    except ValueError:
        pass
    else:
        raise AssertionError("non power-of-two grid accepted")

    names = [n for n, _ in blowup.list_presets()]
    assert names == ["fig2a", "fig2b", "fig2c", "fig4", "fig5", "fig6"]
    with tempfile.TemporaryDirectory() as tmp:
        files = blowup.run_config(blowup.preset_config("fig5"), tmp)
        assert os.path.join(tmp, "momentum_density.csv") in files
        files = blowup.run_config(blowup.preset_config("fig2b"), os.path.join(tmp, "b"), ["time.end=0.05"])
        assert any(f.endswith("trajectories.csv") for f in files)
        try:
            blowup.run_config("[grid]\ncount = 3\n", tmp)
        except ValueError as e:
            assert "power of two" in str(e)
        else:
            raise AssertionError("invalid config accepted")

    print("blowup smoke test: ok")


if __name__ == "__main__":
    main()
