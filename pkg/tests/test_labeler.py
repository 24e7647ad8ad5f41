import pytest

from conftest import make_account, make_post
from phonecamp.cluster import Campaign, campaign_id_for
from phonecamp.ingest import Corpus, Thresholds
from phonecamp.labeler import (CampaignStore, DncList, LabelError, ReviewLabel,
                               eligible_for_characterization,
                               filter_verified_phones, flag_spam)
from phonecamp.phone_core import normalize_phone


def make_campaign(phones=("18885512881",), post_ids=(("TW", "p1"),),
                  user_ids=(("TW", "u1"),)):
    normalized = [normalize_phone(p) for p in phones]
    return Campaign(campaign_id=campaign_id_for(normalized),
                    phones=normalized, post_ids=set(post_ids),
                    user_ids=set(user_ids))


class TestDncList:
    def test_loads_with_comments_and_blanks(self, tmp_path):
        path = tmp_path / "dnc.txt"
        path.write_text("# registry dump\n18885512881\n\n"
                        "1-800-549-5301  # formatted entry\n")
        dnc = DncList.from_file(path)
        assert "18885512881" in dnc
        assert "18005495301" in dnc
        assert "15555555555" not in dnc

    def test_bad_entry_rejected(self, tmp_path):
        path = tmp_path / "dnc.txt"
        path.write_text("123\n")
        with pytest.raises(LabelError) as exc:
            DncList.from_file(path)
        assert exc.value.reason == "bad_dnc_entry"


class TestVerifiedFilter:
    def test_verified_author_excludes_phone(self):
        corpus = Corpus()
        corpus.add_post(
            make_post(post_id="a", user_id="celeb",
                      phones=["18885512881"]),
            make_account(user_id="celeb", verified=True))
        corpus.add_post(
            make_post(post_id="b", user_id="rando",
                      phones=["18005495301"]),
            make_account(user_id="rando"))
        assert filter_verified_phones(corpus) == {"18885512881"}

    def test_no_verified_accounts(self):
        corpus = Corpus()
        corpus.add_post(make_post(phones=["18885512881"]), make_account())
        assert filter_verified_phones(corpus) == set()


class TestFlagSpam:
    def _dnc(self, tmp_path, *numbers):
        path = tmp_path / "dnc.txt"
        path.write_text("\n".join(numbers) + "\n")
        return DncList.from_file(path)

    def test_dnc_hit(self, tmp_path):
        campaign = make_campaign()
        corpus = Corpus()
        result = flag_spam(campaign, self._dnc(tmp_path, "18885512881"),
                           corpus)
        assert result["auto_flag"]
        assert result["reasons"] == [{"kind": "dnc_phone",
                                      "phone": "18885512881"}]

    def test_suspended_account_hit(self, tmp_path):
        campaign = make_campaign(user_ids=[("TW", "u1")])
        corpus = Corpus()
        corpus.add_post(make_post(phones=["18885512881"]),
                        make_account(status="unknown"))
        corpus.update_account_status("TW", "u1", "suspended", 100.0)
        result = flag_spam(campaign, self._dnc(tmp_path, "19995551234"),
                           corpus)
        assert result["auto_flag"]
        assert result["reasons"][0]["kind"] == "suspended_account"

    def test_clean_campaign_not_flagged(self, tmp_path):
        campaign = make_campaign()
        corpus = Corpus()
        corpus.add_post(make_post(phones=["18885512881"]), make_account())
        result = flag_spam(campaign, self._dnc(tmp_path, "19995551234"),
                           corpus)
        assert not result["auto_flag"]
        assert result["reasons"] == []

    def test_both_reasons_reported(self, tmp_path):
        campaign = make_campaign()
        corpus = Corpus()
        corpus.add_post(make_post(phones=["18885512881"]), make_account())
        corpus.update_account_status("TW", "u1", "suspended", 100.0)
        result = flag_spam(campaign, self._dnc(tmp_path, "18885512881"),
                           corpus)
        kinds = {r["kind"] for r in result["reasons"]}
        assert kinds == {"dnc_phone", "suspended_account"}


class TestEligibility:
    def test_below_cut(self):
        campaign = make_campaign(post_ids=[("TW", f"p{i}") for i in range(4)])
        assert not eligible_for_characterization(campaign, Thresholds())

    def test_at_cut(self):
        t = Thresholds(min_campaign_posts=4)
        campaign = make_campaign(post_ids=[("TW", f"p{i}") for i in range(4)])
        assert eligible_for_characterization(campaign, t)


class TestReviewLabels:
    def _store(self):
        store = CampaignStore()
        campaign = make_campaign()
        store.add(campaign)
        return store, campaign

    def test_bad_verdict(self):
        with pytest.raises(LabelError) as exc:
            ReviewLabel("c1", "maybe", "pharmacy", "rev", 1.0)
        assert exc.value.reason == "bad_verdict"

    def test_label_applied(self):
        store, campaign = self._store()
        store.apply_review_label(ReviewLabel(
            campaign.campaign_id, "spam", "tech support", "alice", 10.0))
        assert campaign.label == "spam"
        assert campaign.topic == "tech support"
        assert len(campaign.label_history) == 1

    def test_latest_wins_history_kept(self):
        store, campaign = self._store()
        store.apply_review_label(ReviewLabel(
            campaign.campaign_id, "spam", "pharmacy", "alice", 10.0))
        store.apply_review_label(ReviewLabel(
            campaign.campaign_id, "benign", "pharmacy", "bob", 20.0))
        assert campaign.label == "benign"
        assert [e["verdict"] for e in campaign.label_history] == \
            ["spam", "benign"]

    def test_identical_resubmission_idempotent(self):
        store, campaign = self._store()
        label = ReviewLabel(campaign.campaign_id, "spam", "pharmacy",
                            "alice", 10.0)
        store.apply_review_label(label)
        store.apply_review_label(label)
        assert len(campaign.label_history) == 1

    def test_unknown_campaign(self):
        store, _ = self._store()
        with pytest.raises(LabelError) as exc:
            store.apply_review_label(ReviewLabel("cdeadbeef", "spam", "x",
                                                 "alice", 1.0))
        assert exc.value.reason == "unknown_campaign"
