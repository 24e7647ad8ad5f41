import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from phonecamp.ingest import Account, Engagement, Post, Thresholds
from phonecamp.phone_core import load_bundled_table, normalize_phone


@pytest.fixture(scope="session")
def table():
    return load_bundled_table()


@pytest.fixture
def thresholds():
    return Thresholds()


def make_post(post_id="p1", platform="TW", user_id="u1", timestamp=1000.0,
              text="hello world", urls=None, phones=None, likes=0, shares=0,
              reactions=0, client=None, language=None, has_photo=False):
    return Post(post_id=post_id, platform=platform, user_id=user_id,
                timestamp=timestamp, text=text, urls=urls or [],
                phones=[normalize_phone(p) for p in (phones or [])],
                engagement=Engagement(likes=likes, shares=shares,
                                      reactions=reactions),
                client=client, language=language, has_photo=has_photo)


def make_account(platform="TW", user_id="u1", display_name="User One",
                 screen_name=None, verified=False, status="active",
                 followers=0, friends=0):
    return Account(platform=platform, user_id=user_id,
                   display_name=display_name, screen_name=screen_name,
                   verified=verified, status=status, followers=followers,
                   friends=friends)
