"""Quick check that the extension module imports and agrees with itself.

Build and install first:  pip install --no-build-isolation ./crates/python
"""

import math
import random

import smoothmax_py as sm


def main():
    square = [[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]]
    exact = sm.welzl_exact(square)
    assert abs(exact.radius - math.sqrt(2.0)) < 1e-12, exact
    assert len(exact.support) >= 2

    rng = random.Random(5)
    cloud = [[rng.gauss(0, 1) for _ in range(3)] for _ in range(300)]
    r_exact = sm.welzl_exact(cloud, seed=1).radius
    for eps in (0.1, 0.01):
        ball = sm.solve_meb(cloud, eps)
        assert ball.radius <= (1 + eps) * r_exact * (1 + 1e-9), (eps, ball)
        assert ball.iterations == ball.planned_iterations
        core = sm.badoiu_clarkson(cloud, eps)
        assert core.radius <= (1 + eps) * r_exact * (1 + 1e-9), (eps, core)

    assert sm.required_iterations_meb(1.0, 2) == 28
    assert sm.required_iterations_general(0.1, 2, 1.0, 2.0, 2.0, 1.0) == 12
    assert abs(sm.smoother_for_gap(0.1, 2) - 20 * math.log(2)) < 1e-12
    assert abs(sm.gap_bound(11, 2.0, 1.0, 1.0, 0.0) - math.exp(-10)) < 1e-15

    fam = sm.QuadraticFamily([[-1.0, 0.0], [1.0, 0.0]], [1.0, 1.0])
    assert len(fam) == 2
    x = [0.3, -0.2]
    f, fs = fam.value(x), fam.smooth_value(x, 10.0)
    assert f <= fs <= f + math.log(2) / 10.0
    g = fam.smooth_gradient(x, 10.0)
    h = 1e-6
    for j in range(2):
        xp, xm = list(x), list(x)
        xp[j] += h
        xm[j] -= h
        fd = (fam.smooth_value(xp, 10.0) - fam.smooth_value(xm, 10.0)) / (2 * h)
        assert abs(fd - g[j]) < 1e-6, (j, fd, g[j])
    hess = fam.smooth_hessian(x, 10.0)
    assert hess[0][1] == hess[1][0]

    rep = fam.run_to_gap(0.01, [1.5, 1.0], 3.0, 3.0)
    assert rep.value - 1.0 <= 0.01, rep
    assert rep.gap_certificate <= 0.01 + 1e-12

    try:
        sm.solve_meb(cloud, 0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("epsilon 0 accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
