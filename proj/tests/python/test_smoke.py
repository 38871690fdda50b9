import math

import ri2d


def test_potential_reference_values():
    a = ri2d.shared_potential()
    assert a.at(0, 0) == 0.0
    assert abs(a.at(1, 0) - 1.0) < 1e-6
    assert abs(a.at(1, 1) - 4.0 / math.pi) < 1e-4


def test_capacity_of_a_pair():
    assert abs(ri2d.capacity([(0, 0), (1, 0)]) - 0.5) < 1e-6


def test_harmonic_measures():
    hm = ri2d.equilibrium_harmonic_measure([(0, 0), (1, 0)])
    assert abs(hm.weight_of(0, 0) - 0.5) < 1e-9
    cond = ri2d.conditional_harmonic_measure(
        ri2d.ball_sites((0, 0), 4.0), (0, 0), 12.0
    )
    assert abs(sum(cond.weights) - 1.0) < 1e-9


def test_threshold_formulas():
    assert abs(ri2d.psi(16, 1.0, math.e) - 9.719627403010996) < 1e-9
    assert ri2d.downward_threshold(10.0) == 200.0 - 10.0 ** 1.5


def test_poisson_tv():
    tv = ri2d.poisson_intensity_tv(1.0, 1.0)
    assert abs(tv.exact - 0.3297530326330465) < 1e-12
    assert tv.exact <= tv.bound


def test_hitting_bundle():
    rng = ri2d.RngStream(7)
    b = ri2d.sample_hitting_bundle([(0, 0), (1, 0)], 1.0, 40.0, rng)
    assert b.xi_K == len(b.trajectories)
    for t in b.trajectories:
        assert (1, 0) in t.sites


def test_experiment_round_trip():
    out = ri2d.run_experiment("poisson-tv")
    assert len(out.table.rows) == 16
    assert all(row[-1] == "true" for row in out.table.rows)
    text = ri2d.render_report(out.table, "csv")
    assert text.splitlines()[0] == "# experiment=poisson-tv"


def test_reproducible_streams():
    a = ri2d.RngStream(5).derive(3)
    b = ri2d.RngStream(5).derive(3)
    assert [a.uniform() for _ in range(5)] == [b.uniform() for _ in range(5)]
