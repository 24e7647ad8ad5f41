from decimal import Decimal

import pytest
from hypothesis import given, strategies as st

from conftest import make_account
from phonecamp.identity import (IdentityError, edit_distance,
                                estimate_cross_platform_savings,
                                identity_suspension_stats, match_identities,
                                name_similarity)
from phonecamp.ingest import Thresholds
from oracles import brute_edit_distance


class TestEditDistance:
    @pytest.mark.parametrize("a,b,d", [
        ("kitten", "sitting", 3),
        ("", "", 0),
        ("abc", "", 3),
        ("abc", "abc", 0),
        ("flaw", "lawn", 2),
    ])
    def test_known_values(self, a, b, d):
        assert edit_distance(a, b) == d

    @given(st.text(alphabet="abcd", max_size=8),
           st.text(alphabet="abcd", max_size=8))
    def test_matches_recursive_oracle(self, a, b):
        assert edit_distance(a, b) == brute_edit_distance(a, b)

    @given(st.text(max_size=12), st.text(max_size=12))
    def test_symmetry_and_bounds(self, a, b):
        d = edit_distance(a, b)
        assert d == edit_distance(b, a)
        assert abs(len(a) - len(b)) <= d <= max(len(a), len(b))


class TestNameSimilarity:
    def test_kitten_sitting(self):
        assert name_similarity("kitten", "sitting") == \
            pytest.approx(1 - 3 / 7, abs=1e-12)

    def test_case_and_whitespace_insensitive(self):
        assert name_similarity("Cheap  Pills", "cheap pills") == 1.0

    def test_both_empty(self):
        assert name_similarity("", "") == 1.0

    def test_one_empty(self):
        assert name_similarity("", "bob") == 0.0

    @given(st.text(max_size=15), st.text(max_size=15))
    def test_bounds(self, a, b):
        assert 0.0 <= name_similarity(a, b) <= 1.0


class TestMatchIdentities:
    def test_screen_name_match_across_platforms(self, thresholds):
        accounts = [
            make_account(platform="TW", user_id="1", screen_name="pillstore"),
            make_account(platform="FB", user_id="2", screen_name="pillstore1"),
            make_account(platform="YT", user_id="3", screen_name="zzzz"),
        ]
        clusters = match_identities(accounts, thresholds)
        assert len(clusters) == 1
        assert set(clusters[0].members) == {("TW", "1"), ("FB", "2")}
        assert clusters[0].evidence[0]["feature"] == "screen_name"

    def test_display_name_fallback(self, thresholds):
        accounts = [
            make_account(platform="TW", user_id="1", screen_name="pillstore",
                         display_name="Cheap Pills"),
            make_account(platform="GP", user_id="2", screen_name=None,
                         display_name="Cheap Pills Inc"),
        ]
        clusters = match_identities(accounts, thresholds)
        assert len(clusters) == 1
        assert clusters[0].evidence[0]["feature"] == "display_name"

    def test_below_threshold_no_match(self, thresholds):
        accounts = [
            make_account(platform="TW", user_id="1", screen_name="alpha"),
            make_account(platform="FB", user_id="2", screen_name="omega9"),
        ]
        assert match_identities(accounts, thresholds) == []

    def test_order_invariant(self, thresholds):
        accounts = [
            make_account(platform="TW", user_id="1", screen_name="storeA"),
            make_account(platform="FB", user_id="2", screen_name="storeB"),
            make_account(platform="GP", user_id="3", screen_name="different"),
        ]
        fwd = match_identities(accounts, thresholds)
        rev = match_identities(list(reversed(accounts)), thresholds)
        assert [set(c.members) for c in fwd] == [set(c.members) for c in rev]

    def test_transitive_component(self, thresholds):
        # abcdefgh ~ abcdefgX ~ abcdeXgX chain into one component.
        accounts = [
            make_account(platform="TW", user_id="1", screen_name="abcdefgh"),
            make_account(platform="FB", user_id="2", screen_name="abcdefgZ"),
            make_account(platform="GP", user_id="3", screen_name="abcdeYgZ"),
        ]
        clusters = match_identities(accounts, thresholds)
        assert len(clusters) == 1
        assert len(clusters[0].members) == 3


class TestSuspensionStats:
    def test_fractions_and_asymmetry(self, thresholds):
        accounts = [
            make_account(platform="TW", user_id="1", screen_name="spamstore",
                         status="suspended"),
            make_account(platform="TW", user_id="2", screen_name="spamstor3",
                         status="suspended"),
            make_account(platform="FB", user_id="3", screen_name="spamstore",
                         status="active"),
            make_account(platform="FB", user_id="4", screen_name="spamstor4",
                         status="suspended"),
        ]
        clusters = match_identities(accounts, thresholds)
        index = {a.key: a for a in accounts}
        stats = identity_suspension_stats(clusters, index)
        assert stats["fractions"]["TW"] == 1.0
        assert stats["fractions"]["FB"] == 0.5
        assert stats["asymmetry"]["TW_vs_FB"] == pytest.approx(0.5)

    def test_empty_clusters(self):
        stats = identity_suspension_stats([], {})
        assert stats["fractions"] == {}
        assert stats["asymmetry"] == {}


class TestSavings:
    def test_exact_decimal_product(self, thresholds):
        est = estimate_cross_platform_savings(
            {"TW": 99, "FB": 21053, "GP": 11538, "YT": 2816}, thresholds)
        assert est.total_victims == 35407
        assert est.total_savings == Decimal("10299896.30").normalize()

    def test_seed_platform_excluded(self, thresholds):
        est = estimate_cross_platform_savings(
            {"TW": 100, "FB": 50}, thresholds, seed_platform="TW")
        assert est.total_victims == 50
        est2 = estimate_cross_platform_savings(
            {"TW": 100, "FB": 50}, thresholds, seed_platform="FB")
        assert est2.total_victims == 100

    def test_reference_discrepancy_annotated(self, thresholds):
        est = estimate_cross_platform_savings(
            {"TW": 0, "FB": 21053, "GP": 11538, "YT": 2816}, thresholds,
            reference_total=Decimal("8800000"))
        assert est.lower_bound
        assert any("discrepancy" in n for n in est.notes)

    def test_matching_reference_no_discrepancy(self, thresholds):
        est = estimate_cross_platform_savings(
            {"FB": 10}, thresholds, reference_total=Decimal("2909.0"))
        assert not any("discrepancy" in n for n in est.notes)

    def test_empty_counts_rejected(self, thresholds):
        with pytest.raises(IdentityError) as exc:
            estimate_cross_platform_savings({}, thresholds)
        assert exc.value.reason == "missing_audience_data"
