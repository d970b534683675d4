"""Smoke test for the symbounds_py extension module."""

import math

import symbounds_py as sb


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    assert close(sb.exponent_cs(0.5, 0.5), 0.2616240718822739)
    assert close(sb.exponent_kl(0.5, 0.5), math.log(2) / 3)
    assert close(sb.exponent_cs(1.0, 0.5), sb.exponent_kl(1.0, 0.5))

    b = sb.tail_bound_t1(100, 0.5, 0.5)
    assert close(b.raw, 8.686421925300872e-12) and b.clamped == b.raw
    assert sb.tail_bound_t2(2, 0.5, 0.1).clamped == 1.0

    t3 = sb.tail_bound_t3(10, 0.5, 1.0, [0.5, 0.25])
    assert close(t3.raw, 0.1263553859747741, 1e-10) and t3.method == "minimized"

    assert close(sb.freedman_c(1.0), 0.934320049292896)
    assert close(sb.freedman_b(1.0), 0.7725887222397812)
    tight = sb.freedman_bound(3, 5, 1)
    classical = sb.freedman_bound(3, 5, 1, "classical")
    exact = sb.exact_max_tail("symmetric", 0.5, 10, 3.0, two_sided=False)
    assert exact == 24805 / 131072
    assert exact <= tight <= classical

    rate = sb.rate_convergence("symmetric", 0.5, 0.4, [250, 500])
    assert all(g > 0 for g in rate.gaps) and rate.gaps[1] < rate.gaps[0]

    lhs, rhs, equal = sb.refined_bennett_check(0.3, 2.0, 1.5)
    assert equal, (lhs, rhs)

    est = sb.estimate_tail("extremal", 0.5, 2, 0.5, side="two", trials=200_000, seed=7)
    assert est.covers(0.75), est
    again = sb.estimate_tail("extremal", 0.5, 2, 0.5, side="two", trials=200_000, seed=7)
    assert again.hits == est.hits

    for call in (lambda: sb.exponent_cs(1.5, 0.5), lambda: sb.freedman_b(0.0)):
        try:
            call()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")
    try:
        sb.exact_tail("symmetric", 0.5, 100_000, 1.0)
    except RuntimeError:
        pass
    else:
        raise AssertionError("expected the resource guard to trip")

    print("symbounds_py smoke test passed")


if __name__ == "__main__":
    main()
