import numpy as np
import pytest

from banditgne.errors import InvalidExponents
from banditgne.schedules import (
    ConsensusEnvelope,
    Schedule,
    consensus_envelope,
    corollary2_exponents,
    gamma_recursion_slack,
    schedule_conditions,
)

PAPER = (0.45, 0.1, 0.11)


def test_first_round_is_all_ones():
    p = Schedule(*PAPER, r_min=15.0).value_at(1)
    assert tuple(p) == (1.0, 1.0, 1.0, 15.0, 1.0)


def test_alpha_at_hundred():
    assert Schedule(*PAPER, r_min=1.0).value_at(100).alpha == pytest.approx(0.12589, abs=1e-5)


def test_delayed_warmup_values():
    s = Schedule(*PAPER, r_min=1.0, tau=1, variant="delayed")
    p1, p2, p5 = s.value_at(1), s.value_at(2), s.value_at(5)
    assert (p1.alpha, p1.beta, p1.gamma) == (1.0, 1.0, 1.0)
    # t = 2 is the first update round and runs on the clock t - tau = 1
    assert (p2.alpha, p2.beta, p2.gamma) == (1.0, 1.0, 1.0)
    assert p5.alpha == 4.0**-0.45
    assert p5.eta == 5.0**-0.11


def test_corollary2():
    a1, a2, a3 = corollary2_exponents()
    assert (a1, a2, a3) == pytest.approx((3 / 7, 0.0, 1 / 7))
    assert a1 - 2 * a2 - 2 * a3 == pytest.approx(1 / 7)
    assert a2 < a3
    Schedule(a1, a2, a3, r_min=1.0)


@pytest.mark.parametrize(
    "exps, variant, cited",
    [
        ((0.45, 0.2, 0.1), "delay_free", "a2 < a3"),
        ((0.6, 0.05, 0.1), "delay_free", "a1 < 0.5"),
        ((0.3, 0.1, 0.11), "delay_free", "a1 - 2*a2 - 2*a3 > 0"),
    ],
)
def test_condition_violations(exps, variant, cited):
    assert cited in schedule_conditions(*exps, variant)
    with pytest.raises(InvalidExponents, match=cited.replace("*", r"\*")):
        Schedule(*exps, r_min=1.0, variant=variant)


def test_delayed_variant_drops_a1_bound():
    assert schedule_conditions(0.6, 0.05, 0.1, "delayed") == []
    with pytest.raises(InvalidExponents):
        Schedule(*PAPER, r_min=1.0, tau=2, variant="delay_free")


@pytest.mark.parametrize("exps", [PAPER, corollary2_exponents()], ids=["benchmark", "balanced"])
def test_sequences_monotone_and_gamma_inequality(exps):
    s = Schedule(*exps, r_min=3.0)
    arr = s.arrays(100_000)
    for name, seq in arr.items():
        assert np.all(np.diff(seq) <= 0), name
        cap = 3.0 if name == "delta" else 1.0
        assert np.all((seq > 0) & (seq <= cap)), name
    np.testing.assert_allclose(arr["delta"], 3.0 * arr["eta"], rtol=1e-15)
    assert gamma_recursion_slack(s, 100_000).max() <= 1e-12


def test_incremental_envelope_matches_direct_sum():
    s = Schedule(*PAPER, r_min=1.0)
    env = ConsensusEnvelope(s, 0.8, 5, 2.0)
    for t in range(1, 60):
        assert env.advance() == pytest.approx(consensus_envelope(s, t, 0.8, 5, 2.0), rel=1e-12)
