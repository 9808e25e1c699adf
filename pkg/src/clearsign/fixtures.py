"""Hand-encoded descriptor documents for nineteen popular sites, reproducing
the sign survey used as the regression suite.

Each fixture encodes a site's consent-form findings as a minimal set of AI
services.  Where a review found data shared with third parties, an outside
accessor appears; where no sharing was stated, data stays with the system;
privacy-preserving sites run services that touch no personal data at all.
All reviewed sites keep their AI code closed, so every fixture is opaque.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

SELF = {"name": "the system", "kind": "system_itself"}


def _company(name: str) -> dict[str, str]:
    return {"name": name, "kind": "company"}


def _purpose(pid: str, label: str, category: str, specific: bool = True) -> dict[str, Any]:
    return {"id": pid, "label": label, "category": category, "specific": specific}


PURPOSES = {
    "personalized-ads": _purpose("personalized-ads", "Personalized ads", "ad_selection"),
    "feed-ranking": _purpose("feed-ranking", "News feed ranking", "content_service"),
    "video-recommendation": _purpose(
        "video-recommendation", "Video recommendation", "content_service"
    ),
    "search-ranking": _purpose("search-ranking", "Search result ranking", "content_service"),
    "search-suggestions": _purpose(
        "search-suggestions", "Search query suggestions", "content_service"
    ),
    "audience-insights": _purpose(
        "audience-insights", "Audience measurement", "market_research"
    ),
    "spam-detection": _purpose("spam-detection", "Spam and abuse detection", "content_service"),
    "stream-recommendation": _purpose(
        "stream-recommendation", "Stream recommendation", "content_service"
    ),
    "related-content": _purpose(
        "related-content", "Related content suggestion", "content_service"
    ),
    "weather-forecasting": _purpose(
        "weather-forecasting", "Local weather forecasting", "content_service"
    ),
    "place-search": _purpose("place-search", "Place name search", "content_service"),
    "vandalism-detection": _purpose(
        "vandalism-detection", "Vandalism detection", "content_service"
    ),
}


def _service(
    sid: str,
    name: str,
    purpose: str,
    categories: tuple[str, ...] = (),
    retention: str = "less_than_year",
    third_parties: tuple[str, ...] = (),
) -> dict[str, Any]:
    accessors: list[dict[str, str]] = []
    if categories:
        accessors.append(SELF)
        accessors.extend(_company(n) for n in third_parties)
    return {
        "id": sid,
        "name": name,
        "purpose": purpose,
        "data_categories": list(categories),
        "retention": retention,
        "accessors": accessors,
        "code_available": False,
        "training_data_available": False,
        "declared_objective": False,
        "artifact_locations": [],
    }


def _document(
    fixture: str, url: str, purposes: tuple[str, ...], services: list[dict[str, Any]]
) -> dict[str, Any]:
    return {
        "id": url,
        "name": fixture,
        "purposes": [PURPOSES[p] for p in purposes],
        "services": services,
    }


def _sharing_site(
    fixture: str,
    url: str,
    content_purpose: str,
    content_name: str,
    content_categories: tuple[str, ...],
    ad_categories: tuple[str, ...] = ("navigation", "use-statistics"),
    partner: str = "advertising partners",
) -> dict[str, Any]:
    """A site whose review found both in-system personalisation and data
    distributed to outside companies."""
    return _document(
        fixture,
        url,
        (content_purpose, "personalized-ads"),
        [
            _service(
                "personalized-ads",
                "Personalized ads",
                "personalized-ads",
                ad_categories,
                retention="year_or_more",
                third_parties=(partner,),
            ),
            _service(
                content_name, PURPOSES[content_purpose]["label"], content_purpose,
                content_categories,
            ),
        ],
    )


def _private_site(
    fixture: str, url: str, purpose: str, service_id: str
) -> dict[str, Any]:
    """A site whose review found no personal data gathering: its AI services
    run without any user-linked input."""
    return _document(
        fixture,
        url,
        (purpose,),
        [_service(service_id, PURPOSES[purpose]["label"], purpose)],
    )


def _build_all() -> dict[str, dict[str, Any]]:
    docs = {
        "google": _sharing_site(
            "google", "www.google.com", "search-ranking", "search-ranking",
            ("navigation", "use-statistics"),
            ad_categories=("location", "navigation", "use-statistics"),
        ),
        "facebook": _sharing_site(
            "facebook", "www.facebook.com", "feed-ranking", "feed-ranking",
            ("images", "navigation", "use-statistics"),
        ),
        "youtube": _sharing_site(
            "youtube", "www.youtube.com", "video-recommendation", "video-recommendation",
            ("use-statistics",),
        ),
        "instagram": _sharing_site(
            "instagram", "www.instagram.com", "feed-ranking", "feed-ranking",
            ("images", "use-statistics"),
        ),
        "twitter": _sharing_site(
            "twitter", "www.twitter.com", "feed-ranking", "timeline-ranking",
            ("use-statistics",),
        ),
        "amazon": _sharing_site(
            "amazon", "www.amazon.com", "related-content", "product-recommendation",
            ("navigation", "use-statistics"),
            partner="marketing partners",
        ),
        "netflix": _sharing_site(
            "netflix", "www.netflix.com", "video-recommendation", "content-recommendation",
            ("use-statistics",),
            partner="analytics vendors",
        ),
        "reddit": _sharing_site(
            "reddit", "www.reddit.com", "feed-ranking", "feed-ranking",
            ("use-statistics",),
        ),
        "tiktok": _sharing_site(
            "tiktok", "www.tiktok.com", "video-recommendation", "feed-ranking",
            ("use-statistics",),
            ad_categories=("location", "use-statistics"),
        ),
        "discord": _document(
            "discord",
            "www.discord.com",
            ("spam-detection", "audience-insights"),
            [
                _service(
                    "spam-detection", "Spam and abuse detection", "spam-detection",
                    ("use-statistics",), retention="less_than_month",
                ),
                _service(
                    "audience-insights", "Audience measurement", "audience-insights",
                    ("use-statistics",), retention="year_or_more",
                    third_parties=("analytics vendors",),
                ),
            ],
        ),
        "twitch": _sharing_site(
            "twitch", "www.twitch.tv", "stream-recommendation", "stream-recommendation",
            ("use-statistics",),
        ),
        "fandom": _sharing_site(
            "fandom", "www.fandom.com", "related-content", "related-content",
            ("navigation", "use-statistics"),
        ),
        "accuweather": _sharing_site(
            "accuweather", "www.accuweather.com", "weather-forecasting",
            "forecast-personalisation", ("location",),
            ad_categories=("location", "navigation"),
        ),
        # review found no third-party sharing stated: data stays in-system
        "whatsapp": _document(
            "whatsapp",
            "www.whatsapp.com",
            ("spam-detection",),
            [
                _service(
                    "spam-detection", "Spam and abuse detection", "spam-detection",
                    ("use-statistics",), retention="less_than_month",
                )
            ],
        ),
        # no personal data gathered at all
        "wikipedia": _private_site(
            "wikipedia", "www.wikipedia.org", "vandalism-detection", "vandalism-detection"
        ),
        "duckduckgo": _private_site(
            "duckduckgo", "www.duckduckgo.com", "search-ranking", "web-search"
        ),
        "github": _private_site(
            "github", "www.github.com", "search-suggestions", "code-search"
        ),
        "wordpress": _private_site(
            "wordpress", "www.wordpress.org", "related-content", "related-posts"
        ),
        "openstreetmap": _private_site(
            "openstreetmap", "www.openstreetmap.org", "place-search", "place-search"
        ),
    }
    return docs


_FIXTURES = _build_all()

# Wire-value triplets each fixture must derive to (privacy, code/data,
# objectivity).
EXPECTED_SIGNS: dict[str, tuple[str, str, str]] = {
    **{
        name: ("may be exploited", "opaque", "personalised")
        for name in (
            "google", "facebook", "youtube", "instagram", "twitter", "amazon",
            "netflix", "reddit", "tiktok", "discord", "twitch", "fandom",
            "accuweather",
        )
    },
    "whatsapp": ("may be stored", "opaque", "personalised"),
    **{
        name: ("not gathered", "opaque", "indistinct")
        for name in ("wikipedia", "duckduckgo", "github", "wordpress", "openstreetmap")
    },
}


def fixture_names() -> list[str]:
    return sorted(_FIXTURES)


def build_fixture(name: str) -> dict[str, Any]:
    """A fresh copy of one fixture's descriptor document."""
    if name not in _FIXTURES:
        raise KeyError(f"unknown fixture: {name!r} (have {', '.join(fixture_names())})")
    return json.loads(json.dumps(_FIXTURES[name]))


def vague_purpose_fixture() -> dict[str, Any]:
    """A descriptor document whose purpose uses the banned blanket wording;
    must be rejected by validation."""
    return {
        "id": "www.example-vague.com",
        "name": "vague-example",
        "purposes": [
            {
                "id": "improve",
                "label": "Develop and improve products",
                "category": "content_service",
                "specific": False,
            }
        ],
        "services": [
            {
                "id": "mystery-analytics",
                "name": "Mystery analytics",
                "purpose": "improve",
                "data_categories": ["use-statistics"],
                "retention": "year_or_more",
                "accessors": [SELF],
            }
        ],
    }


def write_fixtures(directory: str | Path) -> list[Path]:
    """Write every fixture document (plus the vague example) as pretty JSON."""
    out_dir = Path(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in fixture_names():
        path = out_dir / f"{name}.json"
        path.write_text(
            json.dumps(build_fixture(name), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        written.append(path)
    vague_path = out_dir / "vague-example.json"
    vague_path.write_text(
        json.dumps(vague_purpose_fixture(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    written.append(vague_path)
    return written
