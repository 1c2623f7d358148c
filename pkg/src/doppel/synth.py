"""Synthetic populations of genuine, fan and bot accounts with posts.

Stands in for a private crawled dataset so the whole pipeline can run and
be tested at desk scale. Class-conditional distributions are calibrated
so that 1000-account fan/bot samples reproduce the reference cluster
statistics (follower counts, profile-similarity levels, photo-match
rates, per-post engagement) within tolerance. Ground-truth labels are
written to a separate quarantined file that no pipeline stage reads.
"""

from __future__ import annotations

import os
import zlib
from dataclasses import dataclass, field, asdict

import numpy as np

from .records import PostRecord, ProfileRecord
from .similarity import text_cosine

_FIRST_NAMES = (
    "emma", "olivia", "sophia", "isabella", "charlotte", "amelia", "harper",
    "james", "henry", "lucas", "mason", "ethan", "logan", "jacob", "daniel",
    "victoria", "scarlett", "nora", "hazel", "aurora", "stella", "leo",
    "julia", "adam",
)
_LAST_NAMES = (
    "walker", "turner", "parker", "carter", "brooks", "hayes", "reed",
    "morgan", "bennett", "foster", "coleman", "hunter", "palmer", "warren",
    "grant", "fields", "stone", "rivers", "blake", "woods", "lane", "fox",
    "gray", "marsh",
)

_PLACES = ("stadium", "arena", "studio", "city", "festival", "gala", "theatre", "park")
_NOUNS = ("project", "album", "season", "chapter", "journey", "campaign", "collection", "tour")

_GENUINE_CAPTIONS = (
    "grateful for the support this {noun} means the world",
    "thrilled to announce our new {noun} coming soon",
    "hard work pays off thank you all for believing",
    "beautiful evening at the {place} with the whole team",
    "honored to meet so many wonderful people today",
    "big news dropping this week stay tuned everyone",
    "reflecting on an incredible year of growth and change",
    "behind the scenes of the new {noun} more soon",
    "thank you for the warm welcome at the {place}",
    "proud of what this team achieved together this {noun}",
    "taking a quiet moment before the {place} tonight",
    "new beginnings and a fresh {noun} ahead of us",
)
_FAN_CAPTIONS = (
    "so proud of {full} tonight what a performance",
    "{full} is simply the best no debate ever",
    "we love you {first} always supporting you",
    "amazing moment with {full} at the {place}",
    "throwback to when {first} won everything that year",
    "{first} forever nobody compares to the legend",
    "can we talk about how incredible {full} looked",
    "streaming everything {first} made until the end of time",
    "the {place} went wild for {full} last night",
    "daily reminder that {first} invented greatness",
    "my heart belongs to {full} since day one",
    "counting days until {first} returns to the {place}",
)
_BOT_CAPTIONS = (
    "follow for daily {first} updates click the link",
    "best {first} content like and share right now",
    "get more {first} news here follow this page",
    "free {first} wallpapers follow and share today",
    "win {first} tickets click the link in bio",
    "hot {first} deals for fans click website now",
)
_NEUTRAL_CAPTIONS = (
    "what a day at the {place} everyone",
    "new {noun} energy this week",
    "good vibes only at the {place}",
    "weekend mood at the {place}",
)

_BOT_HASHTAGS = ("follow4follow", "like4like", "followback", "instafollow",
                 "viral", "promo", "free", "dailypost")
_FAN_HASHTAGS = ("fanpage", "bestfan", "legend", "love", "forever", "king", "queen")
_GENUINE_HASHTAGS = ("official", "gratitude", "community", "newproject",
                     "behindthescenes", "team", "tour")

_EMOJI = {
    "genuine": "\U0001F64F✨❤",
    "fan": "\U0001F60D❤\U0001F525\U0001F451\U0001F62D",
    "bot": "\U0001F525\U0001F449",
}

_FILLER_WORDS = (
    "news", "page", "photo", "daily", "world", "media", "story", "share",
)

# handle fill uses a small syllable pool so random fills collide across
# profiles instead of acting as per-profile fingerprints in the corpus
_SYLLABLES = ("ba", "la", "ma", "na", "ra", "sa", "ta", "za", "li", "lo", "mi", "no")

_DOMAINS = ("example.com", "linkhub.io", "pages.net", "bio.site")


@dataclass
class ClassDistribution:
    """One class's sampling parameters.

    Impersonator followers are lognormal(follower_mean, follower_sigma);
    genuine followers are log-uniform over [follower_lo, follower_hi],
    defaulting to the verified-account reference range.
    """

    follower_mean: float
    follower_sigma: float
    follower_lo: float = 157_000.0
    follower_hi: float = 197_000_000.0
    followee_mean: float
    media_mean: float
    account_age_mean: float
    account_age_sd: float
    sim_username_mean: float
    sim_full_name_mean: float
    sim_biography_mean: float
    sim_concentration: float
    photo_match_rate: float
    photo_present_rate: float
    like_mean: float
    like_dispersion: float
    comment_mean: float
    comment_dispersion: float
    posts_mean: float
    duplicate_caption_p: float
    hashtags_mean: float
    mentions_mean: float
    tagged_mean: float
    video_rate: float
    url_rate: float
    private_rate: float
    external_url_rate: float
    emoji_mean: float
    neutral_caption_p: float
    repost_caption_p: float

    def validate(self):
        for name, value in asdict(self).items():
            if name.endswith(("_rate", "_p")) and not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be a probability, got {value}")
            if name.endswith("_mean") and value < 0:
                raise ValueError(f"{name} must be >= 0")


def _fan_params(hard: bool) -> ClassDistribution:
    return ClassDistribution(
        follower_mean=101_600, follower_sigma=1.0 if hard else 0.5,
        followee_mean=757, media_mean=808,
        account_age_mean=1400, account_age_sd=400,
        sim_username_mean=0.49, sim_full_name_mean=0.40, sim_biography_mean=0.25,
        sim_concentration=6.0 if hard else 12.0,
        photo_match_rate=0.71, photo_present_rate=1.0,
        like_mean=1600, like_dispersion=8, comment_mean=24.15, comment_dispersion=6,
        posts_mean=2.2, duplicate_caption_p=0.25 if hard else 0.12,
        hashtags_mean=3.5, mentions_mean=1.2, tagged_mean=0.8,
        video_rate=0.25, url_rate=0.3, private_rate=0.05,
        external_url_rate=0.6, emoji_mean=2.5,
        neutral_caption_p=0.2 if hard else 0.1,
        repost_caption_p=0.55 if hard else 0.4,
    )


def _bot_params(hard: bool) -> ClassDistribution:
    return ClassDistribution(
        follower_mean=16_500, follower_sigma=1.0 if hard else 0.6,
        followee_mean=927, media_mean=679,
        account_age_mean=260, account_age_sd=140,
        sim_username_mean=0.13, sim_full_name_mean=0.18, sim_biography_mean=0.18,
        sim_concentration=6.0 if hard else 12.0,
        photo_match_rate=0.17, photo_present_rate=0.85,
        like_mean=774, like_dispersion=5, comment_mean=10.01, comment_dispersion=5,
        posts_mean=2.2, duplicate_caption_p=0.45 if hard else 0.55,
        hashtags_mean=6.0, mentions_mean=0.3, tagged_mean=0.1,
        video_rate=0.1, url_rate=0.7, private_rate=0.02,
        external_url_rate=0.25, emoji_mean=0.8,
        neutral_caption_p=0.2 if hard else 0.1,
        repost_caption_p=0.55 if hard else 0.4,
    )


def _genuine_params(hard: bool) -> ClassDistribution:
    return ClassDistribution(
        follower_mean=5_000_000, follower_sigma=1.6,
        followee_mean=150, media_mean=1500,
        account_age_mean=3000, account_age_sd=500,
        sim_username_mean=0.0, sim_full_name_mean=0.0, sim_biography_mean=0.0,
        sim_concentration=12.0,
        photo_match_rate=0.0, photo_present_rate=1.0,
        like_mean=400_000, like_dispersion=3, comment_mean=9_000, comment_dispersion=3,
        posts_mean=40.0, duplicate_caption_p=0.02,
        hashtags_mean=1.5, mentions_mean=0.5, tagged_mean=1.0,
        video_rate=0.35, url_rate=0.2, private_rate=0.0,
        external_url_rate=0.9, emoji_mean=1.2,
        neutral_caption_p=0.2 if hard else 0.1,
        repost_caption_p=0.0,
    )


@dataclass
class GeneratorConfig:
    """Population sizes, seed and per-class distribution blocks."""

    n_genuine: int = 10
    n_fan: int = 100
    n_bot: int = 100
    seed: int = 0
    separability: str = "easy"
    reference_ts: int = 1_580_428_800  # 2020-01-31T00:00:00Z
    post_window_days: int = 365
    genuine: ClassDistribution = field(default_factory=lambda: _genuine_params(False))
    fan: ClassDistribution = field(default_factory=lambda: _fan_params(False))
    bot: ClassDistribution = field(default_factory=lambda: _bot_params(False))

    @classmethod
    def default(cls, n_genuine=10, n_fan=100, n_bot=100, seed=0, separability="easy"):
        if separability not in ("easy", "hard"):
            raise ValueError("separability must be 'easy' or 'hard'")
        hard = separability == "hard"
        return cls(
            n_genuine=n_genuine, n_fan=n_fan, n_bot=n_bot, seed=seed,
            separability=separability,
            genuine=_genuine_params(hard), fan=_fan_params(hard), bot=_bot_params(hard),
        )

    def params_for(self, cls_name: str) -> ClassDistribution:
        return {"genuine": self.genuine, "fan": self.fan, "bot": self.bot}[cls_name]

    def validate(self):
        if min(self.n_genuine, self.n_fan, self.n_bot) < 0:
            raise ValueError("population counts must be >= 0")
        for block in (self.genuine, self.fan, self.bot):
            block.validate()


def _profile_rng(seed, cls_index, i):
    return np.random.default_rng([seed, cls_index, i])


def _pick(rng, pool):
    return pool[int(rng.integers(0, len(pool)))]


def _rand_letters(rng, n):
    out = ""
    while len(out) < n:
        out += _pick(rng, _SYLLABLES)
    return out[:n]


def _blend_handle(base: str, target_sim: float, rng) -> str:
    """Construct a handle whose bigram cosine vs `base` lands near target_sim.

    Tries every keep-prefix length with random fill, plus a digit-suffix
    variant and a separator-insertion variant (cosine 1.0), and picks the
    closest.
    """
    g = "".join(ch for ch in base.lower() if ch.isalnum())
    if not g:
        g = _rand_letters(rng, 8)
    candidates = []
    for p in range(len(g) + 1):
        candidates.append(g[:p] + _rand_letters(rng, len(g) - p))
    candidates.append(g + str(int(rng.integers(10, 100))))
    mid = len(g) // 2
    if mid >= 1:
        candidates.append(g[:mid] + "_" + g[mid:])
    return min(candidates, key=lambda c: (abs(text_cosine(c, base) - target_sim)))


def _blend_words(base: str, target_sim: float, rng, min_words: int = 3) -> str:
    """Word-level variant of _blend_handle for names and biographies."""
    base_words = base.lower().split()
    n = max(min_words, len(base_words))
    candidates = []
    for p in range(len(base_words) + 1):
        for extra in range(0, 3):
            fill = [_pick(rng, _FILLER_WORDS) for _ in range(max(0, n - p) + extra)]
            candidates.append(" ".join(base_words[:p] + fill))
    return min(candidates, key=lambda c: abs(text_cosine(c, base) - target_sim))


def _beta(rng, mean, concentration):
    if mean <= 0.0:
        return 0.0
    if mean >= 1.0:
        return 1.0
    return float(rng.beta(mean * concentration, (1 - mean) * concentration))


def _lognormal_mean(rng, mean, sigma):
    mu = np.log(mean) - sigma ** 2 / 2.0
    return float(rng.lognormal(mu, sigma))


def _negbin(rng, mean, dispersion):
    p = dispersion / (dispersion + mean)
    return int(rng.negative_binomial(dispersion, p))


@dataclass
class _RichProfile:
    record: ProfileRecord
    true_class: str
    target_username: str | None
    photo_match: bool


def _gen_genuine(config: GeneratorConfig) -> list[_RichProfile]:
    out = []
    used_first, used_last = set(), set()
    params = config.genuine
    for i in range(config.n_genuine):
        rng = _profile_rng(config.seed, 0, i)
        # distinct first and last names keep cross-genuine similarity low;
        # past the pool size fall back to suffixed duplicates
        for _ in range(200):
            first = _pick(rng, _FIRST_NAMES)
            last = _pick(rng, _LAST_NAMES)
            if first not in used_first and last not in used_last:
                break
        else:
            first = _pick(rng, _FIRST_NAMES) + str(i)
            last = _pick(rng, _LAST_NAMES)
        used_first.add(first)
        used_last.add(last)
        username = first + last
        follower = int(np.exp(rng.uniform(np.log(params.follower_lo), np.log(params.follower_hi))))
        bio = f"official account of {first} {last} new {_pick(rng, _NOUNS)} out now"
        record = ProfileRecord(
            username=username,
            full_name=f"{first} {last}",
            biography=bio,
            follower_count=follower,
            followee_count=int(rng.poisson(params.followee_mean)),
            media_count=int(rng.poisson(params.media_mean)),
            is_private=False,
            is_verified=True,
            has_external_url=bool(rng.random() < params.external_url_rate),
            account_age_days=max(365, int(rng.normal(params.account_age_mean, params.account_age_sd))),
            photo_id=f"ph_{username}",
        )
        out.append(_RichProfile(record, "genuine", None, False))
    return out


def _gen_impersonators(config: GeneratorConfig, cls_name: str,
                       genuines: list[_RichProfile]) -> list[_RichProfile]:
    params = config.params_for(cls_name)
    cls_index = 1 if cls_name == "fan" else 2
    count = config.n_fan if cls_name == "fan" else config.n_bot
    out = []
    used = set()
    for i in range(count):
        rng = _profile_rng(config.seed, cls_index, i)
        target = genuines[int(rng.integers(0, len(genuines)))].record
        username = _blend_handle(
            target.username, _beta(rng, params.sim_username_mean, params.sim_concentration), rng
        )
        if username in used or username == target.username:
            username = f"{username}{int(rng.integers(100, 1000))}"
        used.add(username)
        full_name = _blend_handle(
            target.full_name.replace(" ", ""),
            _beta(rng, params.sim_full_name_mean, params.sim_concentration), rng,
        )
        biography = _blend_words(
            target.biography, _beta(rng, params.sim_biography_mean, params.sim_concentration), rng
        )
        # a face match implies the photo exists; absence only among non-matches
        photo_match = rng.random() < params.photo_match_rate
        photo_present = photo_match or rng.random() < params.photo_present_rate
        record = ProfileRecord(
            username=username,
            full_name=full_name,
            biography=biography,
            follower_count=int(_lognormal_mean(rng, params.follower_mean, params.follower_sigma)),
            followee_count=int(rng.poisson(params.followee_mean)),
            media_count=int(rng.poisson(params.media_mean)),
            is_private=bool(rng.random() < params.private_rate),
            is_verified=False,
            has_external_url=bool(rng.random() < params.external_url_rate),
            account_age_days=max(30, int(rng.normal(params.account_age_mean, params.account_age_sd))),
            photo_id=f"ph_{username}" if photo_present else None,
        )
        out.append(_RichProfile(record, cls_name, target.username, photo_match))
    return out


def _gen_population(config: GeneratorConfig) -> list[_RichProfile]:
    config.validate()
    if config.n_genuine < 1 and (config.n_fan or config.n_bot):
        raise ValueError("impersonators need at least one genuine account to target")
    genuines = _gen_genuine(config)
    rich = list(genuines)
    rich += _gen_impersonators(config, "fan", genuines)
    rich += _gen_impersonators(config, "bot", genuines)
    return rich


def gen_profiles(config: GeneratorConfig) -> list[tuple[ProfileRecord, str]]:
    """Generate all profiles; returns (record, true_class) pairs."""
    return [(rp.record, rp.true_class) for rp in _gen_population(config)]


def _caption_pool(cls_name: str):
    return {
        "genuine": _GENUINE_CAPTIONS, "fan": _FAN_CAPTIONS, "bot": _BOT_CAPTIONS,
    }[cls_name]


def gen_posts(profile: ProfileRecord, true_class: str, n: int,
              config: GeneratorConfig, target_name: str | None = None) -> list[PostRecord]:
    """Generate n posts for one profile.

    Deterministic per (config.seed, username). Captions come from the
    class template pool (with a shared neutral pool mixed in); bots reuse
    their own earlier captions with high probability.
    """
    params = config.params_for(true_class)
    rng = np.random.default_rng([config.seed, zlib.crc32(profile.username.encode())])
    if target_name is None:
        target_name = profile.username
    first = target_name.split()[0] if target_name else "star"
    full = target_name
    posts = []
    previous: list[str] = []
    hashtag_pool = {
        "genuine": _GENUINE_HASHTAGS, "fan": _FAN_HASHTAGS, "bot": _BOT_HASHTAGS,
    }[true_class]
    for j in range(n):
        repost = False
        if previous and rng.random() < params.duplicate_caption_p:
            caption = previous[int(rng.integers(0, len(previous)))]
        else:
            draw = rng.random()
            if draw < params.neutral_caption_p:
                pool = _NEUTRAL_CAPTIONS
            elif draw < params.neutral_caption_p + params.repost_caption_p:
                # impersonators republish the genuine account's own content:
                # caption and tags look exactly like a genuine post
                pool = _GENUINE_CAPTIONS
                repost = True
            else:
                pool = _caption_pool(true_class)
            template = _pick(rng, pool)
            caption = template.format(
                first=first, full=full, place=_pick(rng, _PLACES), noun=_pick(rng, _NOUNS)
            )
            n_emoji = int(rng.poisson(params.emoji_mean))
            if n_emoji:
                emoji_pool = _EMOJI["genuine"] if repost else _EMOJI[true_class]
                emoji = "".join(_pick(rng, emoji_pool) for _ in range(n_emoji))
                caption = caption + " " + emoji
            if rng.random() < params.url_rate:
                caption = caption + f" https://{_pick(rng, _DOMAINS)}/p{int(rng.integers(100, 999))}"
        previous.append(caption)
        n_tags = int(rng.poisson(params.hashtags_mean))
        tag_pool = _GENUINE_HASHTAGS if repost else hashtag_pool
        hashtags = [_pick(rng, tag_pool) for _ in range(n_tags)]
        if true_class != "genuine" and not repost and n_tags and rng.random() < 0.8:
            hashtags[0] = first
        mentions = []
        if rng.random() < min(1.0, params.mentions_mean):
            mentions.append(target_name.replace(" ", ""))
        tagged = [f"user{int(rng.integers(1000, 9999))}"
                  for _ in range(int(rng.poisson(params.tagged_mean)))]
        window = config.post_window_days * 86400
        caption_has_url = "https://" in caption
        posts.append(PostRecord(
            publisher_id=profile.username,
            caption=caption,
            hashtags=hashtags,
            mentions=mentions,
            tagged_users=tagged,
            like_count=_negbin(rng, params.like_mean, params.like_dispersion),
            comment_count=_negbin(rng, params.comment_mean, params.comment_dispersion),
            media_type="video" if rng.random() < params.video_rate else "image",
            emoji_count=sum(1 for ch in caption if ord(ch) > 0x2500),
            has_url=caption_has_url,
            timestamp=int(config.reference_ts - rng.integers(0, window)),
            post_id=f"{profile.username}_{j}",
        ))
    return posts


def _photo_oracle_pairs(population: list[_RichProfile]):
    """Explicit verdicts for every (profile, genuine) photo pair."""
    genuines = [rp for rp in population if rp.true_class == "genuine"]
    pairs = []
    for rp in population:
        if rp.record.photo_id is None:
            continue
        for g in genuines:
            if rp.record.username == g.record.username:
                continue
            match = rp.photo_match and rp.target_username == g.record.username
            pairs.append((rp.record.photo_id, g.record.photo_id, match))
    return pairs


def _atomic_write(path, text):
    tmp = str(path) + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def gen_dataset(config: GeneratorConfig, out_dir):
    """Write profiles.jsonl, posts.jsonl, genuine.jsonl, photo_oracle.tsv

    and the quarantined labels.csv. Returns the path dict. All writes are
    atomic and the content is a pure function of the config."""
    import json

    from dataclasses import asdict as dc_asdict

    os.makedirs(out_dir, exist_ok=True)
    population = _gen_population(config)

    posts = []
    for rp in population:
        rng = np.random.default_rng([config.seed, 99, zlib.crc32(rp.record.username.encode())])
        n = max(1, int(rng.poisson(config.params_for(rp.true_class).posts_mean)))
        target_name = rp.target_username
        if rp.true_class != "genuine":
            target = next(p for p in population if p.record.username == rp.target_username)
            target_name = target.record.full_name
        else:
            target_name = rp.record.full_name
        posts.extend(gen_posts(rp.record, rp.true_class, n, config, target_name=target_name))

    paths = {
        "profiles": os.path.join(out_dir, "profiles.jsonl"),
        "posts": os.path.join(out_dir, "posts.jsonl"),
        "genuine": os.path.join(out_dir, "genuine.jsonl"),
        "photo_oracle": os.path.join(out_dir, "photo_oracle.tsv"),
        "labels": os.path.join(out_dir, "labels.csv"),
    }
    _atomic_write(paths["profiles"], "".join(
        json.dumps(dc_asdict(rp.record), ensure_ascii=False) + "\n" for rp in population
    ))
    _atomic_write(paths["posts"], "".join(
        json.dumps(dc_asdict(p), ensure_ascii=False) + "\n" for p in posts
    ))
    _atomic_write(paths["genuine"], "".join(
        json.dumps(dc_asdict(rp.record), ensure_ascii=False) + "\n"
        for rp in population if rp.true_class == "genuine"
    ))
    _atomic_write(paths["photo_oracle"], "".join(
        f"{a}\t{b}\t{1 if m else 0}\n" for a, b, m in _photo_oracle_pairs(population)
    ))
    _atomic_write(paths["labels"], "username,true_class\n" + "".join(
        f"{rp.record.username},{rp.true_class}\n" for rp in population
    ))
    return paths
