import cmath
import math

import pytest

import rtmsim


def test_beam_splitter_is_unitary():
    bs = rtmsim.beam_splitter()
    r = 1 / math.sqrt(2)
    assert abs(bs[0][0] - r) < 1e-15
    assert abs(bs[0][1] - 1j * r) < 1e-15
    for i in range(2):
        for j in range(2):
            dot = sum(bs[k][i].conjugate() * bs[k][j] for k in range(2))
            assert abs(dot - (1 if i == j else 0)) < 1e-12


def test_joint_probabilities_follow_the_coincidence_law():
    for d in (0.0, 0.7, math.pi / 2, math.pi, 5.0):
        p = rtmsim.joint_probabilities(d + 0.3, 0.3)
        assert abs(p[0][0] - rtmsim.coincidence_law(d, "same")) < 1e-12
        assert abs(p[0][1] - rtmsim.coincidence_law(d, "opposite")) < 1e-12
        s, a = rtmsim.marginals(p)
        assert abs(s[0] - 0.5) < 1e-12 and abs(a[1] - 0.5) < 1e-12


def test_reduced_state_has_no_coherence():
    rho = rtmsim.source_density("entangled")
    red = rtmsim.partial_trace(rho, 0)
    q, p = rtmsim.local_coherence(red)
    assert abs(q) < 1e-12 and abs(p) < 1e-12
    assert abs(red[0][0] - 0.5) < 1e-12


def test_local_superposition_witness():
    r = 1 / math.sqrt(2)
    psi = [r, 1j * r]
    rho = [[psi[i] * psi[j].conjugate() for j in range(2)] for i in range(2)]
    q, p = rtmsim.local_coherence(rho)
    assert abs(q) < 1e-12 and abs(p + 1) < 1e-12


def test_chsh():
    _, s = rtmsim.chsh(0, math.pi / 2, math.pi / 4, 3 * math.pi / 4)
    assert abs(abs(s) - 2 * math.sqrt(2)) < 1e-9
    _, s_mix = rtmsim.chsh(0, math.pi / 2, math.pi / 4, 3 * math.pi / 4, source="mixture")
    assert abs(s_mix) <= 2


def test_sampling_is_seeded():
    p = [[0.1, 0.2], [0.3, 0.4]]
    a = rtmsim.sample_events(p, 1000, 12345)
    assert a == rtmsim.sample_events(p, 1000, 12345)
    assert a[:4] == [(2, 2), (1, 2), (2, 2), (1, 1)]
    assert a != rtmsim.sample_events(p, 1000, 12346)


def test_presets():
    for name in ("rtm", "product_control", "mixture_control", "delayed_choice", "cat"):
        r = rtmsim.run_preset(name, n_trials=5000, seed=3)
        assert r["passed"], [v for v in r["verdicts"] if not v["passed"]]
        again = rtmsim.run_preset(name, n_trials=5000, seed=3)
        assert again["csv"] == r["csv"]
        assert again["event_digest"] == r["event_digest"]


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        rtmsim.run_preset("nope")
    with pytest.raises(ValueError):
        rtmsim.source_density("entangled", amp1=1.0, amp2=1.0)
    with pytest.raises(ValueError):
        rtmsim.local_coherence(rtmsim.source_density())


def test_check_suite():
    results = rtmsim.check()
    assert len(results) >= 20
    assert all(ok for _, ok, _ in results)
