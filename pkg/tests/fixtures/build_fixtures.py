"""Regenerate the fixture corpus (corpus.jsonl, gold.jsonl, length_gate.jsonl).

The claim paragraphs, evidence, and gold annotations are hand-written;
this script only assembles them with filler prose and checks the length
and keyword gates. Outputs are committed — tests read the files, not this
script.
"""

from __future__ import annotations

import json
from pathlib import Path

import sys

sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "src"))

from fcn.ids import IdentifierKind, canonical_key, mint_identifier
from fcn.ingest import DEFAULT_KEYWORDS
from fcn.preprocess import strip_markup

HERE = Path(__file__).resolve().parent

# Filler prose: no lexicon foods, no claim verbs, no stance phrases, no
# ingest keywords — inert padding that keeps bodies over the length gate.
F1 = (
    "I have been reading this community for years and the quality of discussion "
    "keeps getting deeper. My family background is in traditional cooking, while my "
    "day job is in data entry, so I sit somewhere between the old ways and the "
    "spreadsheets. Over the last winter I kept a small notebook where I wrote down "
    "every piece of kitchen advice my relatives repeated, and the notebook filled up "
    "faster than I expected."
)
F2 = (
    "For context, my grandparents lived in three different states and every move "
    "added another layer of kitchen lore to the family collection. Some of it was "
    "written on the backs of old calendars, some of it only survives as sayings "
    "repeated at the table in the evening. I have started typing all of it into a "
    "document because I worry that otherwise it will be gone within a generation."
)
F3 = (
    "On the methodology side, I tried to note where each piece of advice came from, "
    "who repeated it most often, and whether anyone in the family ever pushed back "
    "on it. The notes are messy and I am not pretending any rigor here, just an "
    "honest record of what circulates in one ordinary household across an ordinary "
    "decade of birthdays, school lunches, and long train journeys."
)
F4 = (
    "If this post reads long, that is deliberate. The moderators asked for detailed "
    "write-ups instead of one-liners, and I think the context matters as much as the "
    "punchline. Feel welcome to skip ahead if you are pressed for hours, though the "
    "surrounding story explains why my relatives believed what they believed, and "
    "why some of those beliefs traveled better than others."
)
FILLERS = [F1, F2, F3, F4]


def post(
    n: int,
    url: str,
    title: str,
    author: str,
    platform: str,
    paragraphs: list[str],
    replies: list[str] | None = None,
    gold_claims: list[tuple[str, str]] | None = None,
    gold_entities: list[str] | None = None,
    gold_urls: list[str] | None = None,
    expect_kept: bool = True,
    pad: bool = True,
):
    body_parts = list(paragraphs)
    if pad:
        body_parts = [F1] + body_parts + [F2, F3, F4]
    body = "\n\n".join(body_parts)
    record = {
        "url": url,
        "title": title,
        "author": author,
        "platform": platform,
        "body": body,
        "retrieved_at": f"2025-03-{n:02d}T10:00:00Z",
        "published_at": f"2025-01-{n:02d}T08:30:00Z",
        "language": "en",
    }
    if replies:
        record["replies"] = replies
    cleaned = strip_markup(body + ("\n\n" + "\n\n".join(replies) if replies else ""))
    if expect_kept:
        assert len(cleaned) > 1500, f"{url}: cleaned body only {len(cleaned)} chars"
        assert any(k in cleaned.casefold() for k in DEFAULT_KEYWORDS), f"{url}: no keyword"
    gold = None
    if gold_claims is not None:
        gold = {
            "doc_id": mint_identifier(IdentifierKind.DOCUMENT, canonical_key(url)).value,
            "gold_claims": [{"subject": s, "effect": e} for s, e in gold_claims],
            "gold_entities": sorted(set(gold_entities or [s for s, _ in gold_claims])),
            "gold_urls": gold_urls or [],
        }
    return record, gold


def build():
    posts = []

    posts.append(post(
        1, "https://forum.example/posts/turmeric-winter", "My winter turmeric routine",
        "spice_aunty", "forum",
        ["Here is the claim my whole family repeats: Turmeric boosts immunity and improves skin. "
         "Everyone from my grandmother to my gym trainer says some version of it."],
        replies=[
            "I agree completely, it worked for my whole family last winter.",
            "A 2019 trial found the same effect (https://journals.example/trials/2019-immunity).",
        ],
        gold_claims=[("turmeric", "boosts immunity"), ("turmeric", "improves skin")],
        gold_urls=["https://journals.example/trials/2019-immunity"],
    ))

    posts.append(post(
        2, "https://forum.example/posts/curd-at-night", "Curd after sunset debate",
        "night_owl_cook", "forum",
        ["&gt; curd is totally fine whenever\n\nThe elders in my house insist otherwise. "
         "Eating curd at night causes a cold. In Ayurveda this gets repeated constantly, "
         "and they treat it as settled fact rather than a health benefit question."],
        replies=[
            "That has been debunked so many times, it does nothing of the sort.",
            "My nutrition professor called it a myth with no evidence behind it.",
        ],
        gold_claims=[("curd", "causes a cold")],
    ))

    posts.append(post(
        3, "https://blog.example/curcumin-notes", "<p>Curcumin reading notes</p>",
        "labcoat_reader", "blog",
        ["<b>The core finding:</b> Curcumin inhibits inflammatory pathways. "
         "That sentence appears in half the anti-inflammatory supplement marketing I see."],
        replies=[
            "See [this meta-analysis](https://journals.example/meta/curcumin) before assuming doses transfer.",
            "Study shows the lab results, worth noting that bioavailability is the catch.",
        ],
        gold_claims=[("curcumin", "inhibits inflammatory pathways")],
        gold_urls=["https://journals.example/meta/curcumin"],
    ))

    posts.append(post(
        4, "https://forum.example/posts/antioxidant-hype", "Antioxidant hype check",
        "skeptical_uncle", "forum",
        ["The pitch I keep hearing at the gym: Antioxidants help by binding free radicals. "
         "It is always delivered with total confidence and zero follow-up, like a health benefit slogan."],
        replies=["Source? Citation needed on the binding part."],
        gold_claims=[("antioxidants", "help")],
    ))

    posts.append(post(
        5, "https://forum.example/posts/milk-fish", "Milk and fish taboo",
        "coastal_kitchen", "forum",
        ["Milk and fish should not be eaten together. My Bengali in-laws and my Gujarati "
         "neighbors rarely share kitchen rules, but on this one they are united, and they "
         "frame it as basic gut health wisdom."],
        replies=["Is that true in any clinical sense, or just tradition talking here."],
        gold_claims=[("milk", "should not be eaten together")],
        gold_entities=["milk", "fish"],
    ))

    posts.append(post(
        6, "https://forum.example/posts/white-rice-insulin", "White rice and sugar crashes",
        "glucose_graphs", "forum",
        ["White rice spikes insulin levels. My diabetic father's diet chart treats this as rule "
         "number one, and his doctor repeats it at every visit while talking about gut health."],
        replies=["True, but only when it is eaten alone without dal or vegetables."],
        gold_claims=[("white rice", "spikes insulin levels")],
    ))

    posts.append(post(
        7, "https://forum.example/posts/soaked-almonds", "Soaked almonds before exams",
        "exam_season_mom", "forum",
        ["Everyone knows soaked almonds improve memory. Before every exam my mother lined up "
         "five of them on my plate like pills, promising improves memory results by lunchtime."],
        replies=["That is wrong, the soaking part does nothing a normal diet would not."],
        gold_claims=[("almond", "improve memory")],
    ))

    posts.append(post(
        8, "https://forum.example/posts/cumin-water-mornings", "Cumin water mornings",
        "jeera_devotee", "forum",
        ["Cumin aids digestion. That is the entire reason a steel glass of jeera water sits on "
         "my desk every single morning, and half my office has copied the habit."],
        replies=["Can confirm, worked for me after years of heavy lunches."],
        gold_claims=[("cumin", "aids digestion")],
    ))

    posts.append(post(
        9, "https://blog.example/kitchen-remedies", "Kitchen remedies my readers swear by",
        "home_remedy_blog", "blog",
        ["Readers keep mailing me the same line: cumin aids digestion. The lowercase version of "
         "my forum post, basically, and it is always framed as good for digestion overall.",
         "A stricter cousin of the claim also arrives weekly: Cumin aids digestion on an empty "
         "stomach. The empty stomach part is treated as non-negotiable by its believers."],
        replies=["A small crossover trial found the same effect for the morning version "
                 "(https://journals.example/trials/cumin-morning)."],
        gold_claims=[("cumin", "aids digestion"), ("cumin", "aids digestion on an empty stomach")],
        gold_urls=["https://journals.example/trials/cumin-morning"],
    ))

    posts.append(post(
        10, "https://blog.example/spinach-iron", "Spinach, iron, and my grandmother",
        "leafy_greens_fan", "blog",
        ["Spinach is rich in iron and strengthens bones if consumed daily. My grandmother put "
         "that exact sentence on a sticky note above the stove, next to good for digestion notes."],
        replies=["Partially true, the iron is there but absorption depends on preparation."],
        gold_claims=[("spinach", "strengthens bones"), ("spinach", "rich in iron")],
    ))

    posts.append(post(
        11, "https://news.example/wellness/beet-detox", "The beet juice detox wave",
        "city_desk", "news",
        ["Cold-pressed beetroot juice detoxifies the liver. That promise is printed on bottles "
         "across the city this month, usually beside the word superfood in gold type."],
        replies=["Your liver already does that, the detox framing is misleading marketing."],
        gold_claims=[("beetroot", "detoxifies the liver")],
    ))

    posts.append(post(
        12, "https://forum.example/posts/raw-garlic-panic", "Raw garlic cures everything now",
        "myth_buster_77", "forum",
        ["A forwarded message claims raw garlic cures cancer. My aunt now chews three cloves at "
         "dawn because a voice note told her it prevents every illness known to science."],
        replies=[
            "No evidence for the cancer part, none, and the FSSAI advisory said exactly that.",
            "This is dangerous, people skip actual treatment over forwards like this.",
        ],
        gold_claims=[("garlic", "cures cancer"), ("clove", "prevents every illness known to science")],
        gold_entities=["garlic", "clove"],
    ))

    posts.append(post(
        13, "https://news.example/agri/millet-water", "Millets return to the policy table",
        "agri_reporter", "news",
        ["Millets require less water than wheat. The state agriculture briefing repeated the "
         "line three times, pitching millets as a health benefit and a drought hedge at once."],
        replies=["Backed by the irrigation numbers in the annexure "
                 "(https://gov.example/millet-report)."],
        gold_claims=[("millets", "require less water than wheat")],
        gold_urls=["https://gov.example/millet-report"],
    ))

    posts.append(post(
        14, "https://blog.example/avocado-productivity", "Avocado toast productivity culture",
        "brunch_economist", "blog",
        ["Avocado toast is the perfect food for productivity. Three different productivity "
         "newsletters used that exact sentence this quarter, always beside a health benefit chart."],
        replies=["Really? How does a breakfast choose your calendar for you."],
        gold_claims=[("avocado", "the perfect food for productivity")],
    ))

    posts.append(post(
        15, "https://forum.example/posts/bulletproof-reset", "Bulletproof coffee gut reset",
        "fasting_dabbler", "forum",
        ["Fasting with bulletproof coffee resets gut. The influencer who sold me the blender "
         "says it weekly, and the comment section treats it as settled gut health science."],
        replies=["That has been debunked, blended fat in your mug does not do anything special."],
        gold_claims=[("coffee", "resets gut")],
    ))

    posts.append(post(
        16, "https://blog.example/aronia-orchard", "Aronia orchard visit notes",
        "orchard_walker", "blog",
        ["Aronia berries are grown in Poland and Hungary. Also known as chokeberry, the fruit "
         "puckers your mouth instantly. Aronia berries improve heart health, the farmer told "
         "me, rattling off anthocyanin numbers like a health benefit salesman.",
         "The tasting table had varieties such as Viking and Nero lined up in little cups."],
        replies=["A cohort study found the same effect on blood pressure markers "
                 "(https://journals.example/aronia-cohort)."],
        gold_claims=[("aronia berry", "improve heart health")],
        gold_urls=["https://journals.example/aronia-cohort"],
    ))

    posts.append(post(
        17, "https://forum.example/posts/aged-cheddar", "Aged cheddar appreciation post",
        "cheese_board", "forum",
        ["Aged cheddar cheese has a more desirable flavor. Fight me. The crystals, the sharpness, "
         "the way it crumbles, every health benefit debate aside, taste is the point."],
        replies=["My cheesemonger swears by the eighteen month wheel, total testimonial energy."],
        gold_claims=[("cheddar cheese", "has a more desirable flavor")],
    ))

    posts.append(post(
        18, "https://forum.example/posts/sattvic-khichdi", "Khichdi for quiet evenings",
        "ashram_cook", "forum",
        ["Khichdi without onion and garlic is sattvic and calms the mind. Our ashram kitchen "
         "runs on that sentence, and visitors report the gut health difference within days."],
        replies=["Worked for me during a ten day retreat, I slept like a child."],
        gold_claims=[("khichdi", "calms the mind")],
        gold_entities=["khichdi"],
    ))

    posts.append(post(
        19, "https://news.example/food/basmati-gi-tag", "Basmati and the authenticity wars",
        "trade_desk", "news",
        ["Basmati is the aromatic rice variety. The export council's brochure states it as flatly "
         "as a law of physics, right above the health benefit fine print."],
        replies=["The GI registry entry is the receipt (https://gov.example/gi/basmati)."],
        gold_claims=[("basmati rice", "the aromatic rice variety")],
        gold_urls=["https://gov.example/gi/basmati"],
    ))

    posts.append(post(
        20, "https://forum.example/posts/b12-fog", "B12 and the afternoon fog",
        "deficiency_diary", "forum",
        ["My physician put it plainly: Vitamin B12 deficiency causes fatigue. One blood test "
         "later, the afternoon fog finally had a name and a health benefit plan attached."],
        replies=["Is that true for vegetarians specifically, or everyone."],
        gold_claims=[("vitamin b", "causes fatigue")],
    ))

    posts.append(post(
        21, "https://blog.example/tofu-paneer", "Tofu versus paneer, round twelve",
        "protein_ledger", "blog",
        ["Tofu is a healthier and ethical substitute for paneer. My vegan cousin says it at "
         "every family dinner, always with a gut health chart queued up on her phone."],
        replies=["It depends entirely on what you cook and what you care about."],
        gold_claims=[("tofu", "a healthier and ethical substitute for paneer")],
        gold_entities=["tofu", "paneer"],
    ))

    posts.append(post(
        22, "https://forum.example/posts/ghee-warm-milk", "Ghee with warm milk, the old way",
        "grandmas_ledger", "forum",
        ["Ghee improves digestion when taken with warm milk through lubricating the gut lining. "
         "That is the full sentence as my grandmother dictates it, a complete gut health theory."],
        replies=["In moderation it is fine, but the lubrication theory is folk physiology."],
        gold_claims=[("ghee", "improves digestion")],
    ))

    posts.append(post(
        23, "https://blog.example/green-tea-metabolism", "Green tea and the metabolism pitch",
        "tea_spreadsheet", "blog",
        ["Green tea boosts metabolism. Every January the claim returns, usually with a health "
         "benefit infographic and a discount code taped to it."],
        replies=["A randomized trial found the same effect, tiny but measurable "
                 "(https://journals.example/green-tea-rct)."],
        gold_claims=[("green tea", "boosts metabolism")],
        gold_urls=["https://journals.example/green-tea-rct"],
    ))

    posts.append(post(
        24, "https://news.example/health/carrot-eyesight", "The carrot eyesight legend",
        "fact_file", "news",
        ["Carrots improve eyesight. The wartime poster version of the claim still circulates in "
         "school textbooks here, filed under health benefit folklore nobody audits."],
        replies=["Debunked as propaganda decades ago (https://archive.example/carrot-myth)."],
        gold_claims=[("carrot", "improve eyesight")],
        gold_urls=["https://archive.example/carrot-myth"],
    ))

    posts.append(post(
        25, "https://forum.example/posts/wfpb-bp", "A year of WFPB, numbers inside",
        "plant_based_year", "forum",
        ["WFPB lowers blood pressure, and improves sleep. Twelve months of home readings say the "
         "first part, and my watch's sleep graph argues the second, a genuine health benefit year.",
         "Ginger calms nausea, and many here swear it straightens your mood on grey mornings. "
         "Moong sprouts settle the stomach, say the same people, though I never measured either."],
        replies=["Backed by the big lifestyle cohort (https://journals.example/wfpb-cohort)."],
        gold_claims=[
            ("wfpb diet", "lowers blood pressure"),
            ("wfpb diet", "improves sleep"),
            ("ginger", "calms nausea"),
            ("ginger", "straightens your mood"),
            ("sprouts", "settle the stomach"),
        ],
        gold_urls=["https://journals.example/wfpb-cohort"],
    ))

    posts.append(post(
        26, "https://forum.example/posts/rice-water-summer", "Rice water in peak summer",
        "southern_summers", "forum",
        ["Rice water cools the body during summer, my aunts in Tamil Nadu insist. They serve it "
         "before noon, and the whole street treats the habit as a health benefit inheritance."],
        replies=["+1 from a Chennai household, we never skipped it in May."],
        gold_claims=[("rice water", "cools the body")],
    ))

    # Degenerate cases: rejected at ingest, still part of the dump.
    posts.append(post(
        27, "https://forum.example/posts/quoted-only", "All quotes, no content", "echo_chamber",
        "forum",
        ["&gt; everything here is a quote\n&gt; nothing original at all"],
        expect_kept=False, pad=False,
    ))
    posts.append(post(
        28, "https://forum.example/posts/too-short", "Short hot take", "drive_by_poster",
        "forum",
        ["Turmeric boosts immunity and that is all I came to say about this health benefit."],
        expect_kept=False, pad=False,
    ))
    posts.append(post(
        29, "https://forum.example/posts/no-signal", "Completely off-topic ramble",
        "keyboard_wanderer", "forum",
        [],  # pure filler, long enough but zero domain signal
        expect_kept=False, pad=True,
    ))

    records = [r for r, _ in posts]
    golds = [g for _, g in posts if g is not None]

    lines = [json.dumps(r, ensure_ascii=False) for r in records]
    # One corrupt line exercises the "malformed" rejection counter.
    lines.insert(5, '{"url": "https://forum.example/posts/corrupt", "body": unquoted')
    (HERE / "corpus.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (HERE / "gold.jsonl").write_text(
        "".join(json.dumps(g, ensure_ascii=False) + "\n" for g in golds), encoding="utf-8"
    )

    # Length-gate pair: cleaned bodies of exactly 1500 and 1501 chars.
    for n, (name, target) in enumerate([("len1500", 1500), ("len1501", 1501)], start=1):
        base = "This write-up mentions a health benefit early so the keyword gate is satisfied. "
        body = base
        while len(body) < target:
            body += "word "
        body = body[:target]
        if body.endswith(" "):
            body = body[:-1] + "x"
        cleaned = strip_markup(body)
        assert len(cleaned) == target, (name, len(cleaned))
        record = {
            "url": f"https://forum.example/posts/{name}",
            "title": name,
            "platform": "forum",
            "body": body,
            "retrieved_at": f"2025-03-{n:02d}T10:00:00Z",
        }
        mode = "w" if n == 1 else "a"
        with open(HERE / "length_gate.jsonl", mode, encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    print(f"corpus: {len(records)} records (+1 corrupt line), gold: {len(golds)} docs")


if __name__ == "__main__":
    build()
