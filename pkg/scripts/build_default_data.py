#!/usr/bin/env python3
"""Regenerate the bundled knowledge graph, asset catalog and golden fixture.

Output is deterministic (fixed seed), so re-running leaves the files unchanged.

    python scripts/build_default_data.py
"""

from __future__ import annotations

import json
import random
from collections import Counter
from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "src" / "synthroute" / "data"
SEED = 20240521

# intent -> (scene objects, actions)
INTENTS = {
    "Birthday": (["Cake", "Balloons", "Confetti", "Candles", "Gift box", "Party hat"], ["Cut a cake", "Blow out candles", "Open presents"]),
    "Diwali": (["Diya", "Rangoli", "Fireworks", "Lanterns", "Sweets"], ["Light diyas", "Draw rangoli", "Watch fireworks"]),
    "Baby shower": (["Balloons", "Teddy bear", "Baby bottle", "Stork", "Clouds"], ["Open presents", "Play games"]),
    "Wedding": (["Rings", "Flowers", "Champagne", "Wedding arch", "Doves"], ["Say vows", "Toss the bouquet", "Raise a toast"]),
    "Christmas": (["Christmas tree", "Snowflakes", "Gift box", "Reindeer", "Ornaments", "Candy cane"], ["Decorate the tree", "Exchange gifts", "Sing carols"]),
    "Halloween": (["Pumpkin", "Bats", "Ghost", "Candy", "Spider web"], ["Carve pumpkins", "Go trick or treating"]),
    "Graduation": (["Graduation cap", "Diploma", "Confetti", "Stars"], ["Toss caps", "Raise a toast", "Take photos"]),
    "Anniversary": (["Rings", "Roses", "Heart", "Champagne", "Candles"], ["Raise a toast", "Share a meal"]),
    "Thanksgiving": (["Turkey", "Pumpkin", "Autumn leaves", "Pie", "Corn"], ["Share a meal", "Give thanks"]),
    "Easter": (["Bunny", "Eggs", "Tulips", "Basket", "Chicks"], ["Hunt eggs", "Paint eggs"]),
    "Valentine's day": (["Heart", "Roses", "Chocolates", "Cupid", "Love letter"], ["Exchange gifts", "Share a meal"]),
    "New year": (["Fireworks", "Clock", "Champagne", "Confetti", "Disco ball"], ["Count down", "Raise a toast", "Watch fireworks"]),
    "Mother's day": (["Flowers", "Heart", "Tea cup", "Breakfast tray"], ["Give flowers", "Share a meal"]),
    "Father's day": (["Necktie", "Grill", "Fishing rod", "Mustache"], ["Fire up the grill", "Go fishing"]),
    "Eid": (["Crescent moon", "Lanterns", "Mosque", "Dates", "Stars"], ["Share a meal", "Exchange gifts"]),
    "Hanukkah": (["Menorah", "Dreidel", "Star of david", "Candles"], ["Light the menorah", "Spin the dreidel"]),
    "Lunar new year": (["Red envelope", "Lanterns", "Dragon", "Firecrackers", "Plum blossom"], ["Give red envelopes", "Watch the dragon dance"]),
    "Retirement": (["Clock", "Palm trees", "Golf clubs", "Champagne"], ["Raise a toast", "Share memories"]),
    "Housewarming": (["House", "Plants", "Keys", "Wine glasses"], ["Tour the house", "Share a meal"]),
    "Bridal shower": (["Flowers", "Champagne", "Lace", "Rings", "Tea cup"], ["Open presents", "Play games"]),
    "Engagement": (["Rings", "Roses", "Heart", "Champagne"], ["Raise a toast", "Pop the question"]),
    "Back to school": (["Backpack", "Pencils", "Books", "Apple", "School bus"], ["Pack the backpack", "Meet the teacher"]),
    "Summer sale": (["Sun", "Beach", "Sunglasses", "Shopping bags", "Palm trees"], ["Shop the sale", "Save big"]),
    "Black friday": (["Shopping bags", "Price tag", "Gift box", "Shopping cart"], ["Shop the sale", "Grab a deal"]),
    "Product launch": (["Rocket", "Laptop", "Smartphone", "Spotlight"], ["Pre order now", "Join the waitlist"]),
    "Grand opening": (["Ribbon", "Scissors", "Balloons", "Storefront"], ["Cut the ribbon", "Visit the store"]),
    "Fundraiser": (["Heart", "Hands", "Donation jar", "Ribbon"], ["Donate today", "Volunteer"]),
    "Bake sale": (["Cupcakes", "Cookies", "Pie", "Rolling pin"], ["Buy a treat", "Bake cookies"]),
    "Yard sale": (["Price tag", "Boxes", "Lamp", "Bicycle"], ["Browse the deals"]),
    "Concert": (["Guitar", "Microphone", "Stage lights", "Drums", "Speakers"], ["Buy tickets", "Dance", "Sing along"]),
    "Book club": (["Books", "Coffee cup", "Reading glasses", "Bookshelf"], ["Read together", "Discuss the book"]),
    "Yoga class": (["Yoga mat", "Lotus", "Candles", "Plants"], ["Stretch", "Meditate", "Breathe"]),
    "Workshop": (["Laptop", "Notebook", "Lightbulb", "Whiteboard"], ["Sign up", "Learn new skills"]),
    "Webinar": (["Laptop", "Headphones", "Microphone", "Calendar"], ["Register now", "Join live"]),
    "Conference": (["Microphone", "Badge", "Stage lights", "Podium"], ["Register now", "Network"]),
    "Farewell": (["Balloons", "Suitcase", "Airplane", "Cake"], ["Say goodbye", "Share memories"]),
    "Gender reveal": (["Balloons", "Confetti", "Baby bottle", "Question mark"], ["Pop balloons", "Cut a cake"]),
    "Pride month": (["Rainbow", "Heart", "Flag", "Stars"], ["March together", "Celebrate"]),
    "Earth day": (["Globe", "Trees", "Leaves", "Recycling bin"], ["Plant a tree", "Recycle"]),
    "St patrick's day": (["Shamrock", "Rainbow", "Pot of gold", "Leprechaun hat"], ["Wear green", "Raise a toast"]),
    "Independence day": (["Fireworks", "Flag", "Stars", "Barbecue"], ["Watch fireworks", "Fire up the grill"]),
    "Mardi gras": (["Mask", "Beads", "Feathers", "Jester hat"], ["Dance", "Join the parade"]),
    "Oktoberfest": (["Pretzel", "Beer mug", "Sausages", "Accordion"], ["Raise a toast", "Dance"]),
    "Game night": (["Dice", "Cards", "Pizza", "Controller"], ["Play games", "Order pizza"]),
    "Camping trip": (["Tent", "Campfire", "Mountains", "Marshmallows", "Stars"], ["Roast marshmallows", "Pitch the tent"]),
    "Beach party": (["Beach", "Surfboard", "Palm trees", "Sun", "Seashells"], ["Surf", "Dance"]),
    "Wine tasting": (["Wine glasses", "Grapes", "Cheese board", "Barrel"], ["Taste wines", "Raise a toast"]),
    "Pet adoption": (["Puppy", "Kitten", "Paw prints", "Bone"], ["Adopt a pet", "Visit the shelter"]),
    "Garden party": (["Flowers", "Butterflies", "Tea cup", "Garden lights"], ["Share a meal", "Play music"]),
    "Sports day": (["Trophy", "Medal", "Soccer ball", "Whistle"], ["Cheer the team", "Race"]),
    "Science fair": (["Microscope", "Beaker", "Atom", "Robot"], ["Present projects", "Experiment"]),
    "Holi": (["Color powder", "Water balloons", "Flowers", "Sweets"], ["Throw colors", "Dance"]),
    "Ramadan": (["Crescent moon", "Lanterns", "Dates", "Stars"], ["Break the fast", "Share a meal"]),
    "Quinceanera": (["Tiara", "Roses", "Cake", "Ball gown"], ["Dance", "Cut a cake"]),
    "Bar mitzvah": (["Star of david", "Torah", "Balloons", "Cake"], ["Dance", "Raise a toast"]),
    "Open house": (["House", "Keys", "Sign", "Balloons"], ["Tour the house", "Meet the agent"]),
    "Charity run": (["Running shoes", "Medal", "Ribbon", "Finish line"], ["Run", "Donate today"]),
    "Family reunion": (["Picnic basket", "Family tree", "Barbecue", "Photo album"], ["Share memories", "Take photos"]),
    "Movie night": (["Popcorn", "Film reel", "Projector", "Tickets"], ["Watch a movie", "Grab popcorn"]),
    "Cooking class": (["Chef hat", "Cutting board", "Vegetables", "Pan"], ["Cook together", "Sign up"]),
}

DESIGN_TYPES = [
    "Card", "Invite", "Flyer", "Poster", "Banner", "Logo", "Menu", "Certificate", "Brochure", "Newsletter",
    "Instagram post", "Instagram story", "Facebook cover", "Youtube thumbnail", "Business card", "Presentation",
    "Postcard", "Label", "Sticker", "Gift tag", "Thank you card", "Ticket", "Program", "Sign",
    "Calendar", "Bookmark", "Place card", "Save the date", "Announcement", "Coupon", "Gift certificate",
    "Infographic", "Letterhead", "Mug design", "T-shirt", "Tote bag", "Pinterest pin", "Linkedin banner",
    "Email header", "Blog banner", "Wristband", "Table number", "Photo collage", "Video intro",
]
GENERIC_OBJECTS = [
    "Flowers", "Stars", "Ribbon", "String lights", "Sparkles", "Frame", "Border", "Pattern", "Gold foil",
    "Paper texture", "Bokeh", "Geometric shapes", "Leaves", "Brush strokes", "Polka dots", "Streamers",
]

ADJECTIVES = [
    "Elegant", "Vibrant", "Minimal", "Retro", "Playful", "Modern", "Bold", "Cozy", "Festive", "Rustic",
    "Whimsical", "Sleek", "Colorful", "Soft", "Dreamy", "Vintage", "Golden", "Neon", "Pastel", "Floral",
]
STYLES = ["Watercolor", "Flat", "Hand drawn", "Geometric", "Boho", "Art deco", "Scandinavian", "Grunge", "Paper cut"]
PLACES = [
    "on a wooden table", "at sunset", "in the snow", "on the beach", "in a garden", "against a blue sky",
    "on white background", "in soft light", "at night", "by the window", "in the forest", "over the city",
    "in a cozy kitchen", "on pink background", "in the rain", "under string lights",
]
IMAGE_SUBJECTS = [
    "Tropical frangipani flowers", "Golden retriever puppy", "Mountain lake", "Coffee cup", "Stack of books",
    "Autumn leaves", "Red rose", "Hot air balloons", "City skyline", "Vintage bicycle", "Sunflower field",
    "Ocean waves", "Snowy cabin", "Lavender bouquet", "Macarons", "Lemon slices", "Paper airplane",
    "Desert dunes", "Cherry blossoms", "Neon sign", "Succulent plants", "Fresh strawberries", "Street market",
    "Northern lights", "Waterfall", "Sea turtle", "Tabby kitten", "Chess pieces", "Vinyl records",
    "Pine forest", "Glass of lemonade", "Birthday cake", "Christmas ornaments", "Jack o lantern",
    "Diya lamps", "Wedding rings", "Easter eggs", "Fireworks display", "Beach umbrella", "Yoga mat",
]
IMAGE_TAILS = ["floating", "close up", "top view", "in bloom", "at dawn", "with bokeh", "flat lay", "macro shot", ""]
TEMPLATE_THEMES = [
    "Galaxy Minecraft Server", "Summer Sale", "Coffee Shop", "Real Estate", "Fitness Studio", "Bakery",
    "Music Festival", "Book Club", "Tech Startup", "Yoga Retreat", "Pet Grooming", "Law Firm", "Florist",
    "Craft Beer", "Travel Agency", "Photography", "Gaming Tournament", "Podcast", "Farmers Market", "Dental Clinic",
    "Wedding", "Birthday Party", "Baby Shower", "Graduation", "Halloween Party", "Christmas Market",
    "Diwali Festival", "Charity Gala", "Hiking Club", "Art Exhibition", "Science Fair", "Food Truck",
]
TEMPLATE_DESIGNS = [
    "Server Banner", "Flyer", "Poster", "Instagram Post", "Instagram Story", "Logo", "Menu", "Business Card",
    "Invitation", "Youtube Thumbnail", "Facebook Cover", "Newsletter", "Certificate", "Brochure", "Presentation",
]
LOCALES = ["en-US", "en-GB", "en-IN", "en-AU", "en-CA"]
RATIOS = ["1:1", "4:5", "9:16", "16:9", "3:2"]


def slug(text: str) -> str:
    return "".join(c if c.isalnum() else "-" for c in text.lower()).strip("-").replace("--", "-")


def build_kg(rng: random.Random) -> list[dict]:
    rows: list[dict] = []
    ids: dict[tuple[str, str], str] = {}

    def node(kind: str, label: str) -> str:
        key = (kind, label)
        if key not in ids:
            prefix = {"Intent": "intent", "DesignType": "design", "SceneObject": "object", "Action": "action"}[kind]
            ids[key] = f"{prefix}:{slug(label)}"
            rows.append({"record_type": "node", "id": ids[key], "kind": kind, "label": label})
        return ids[key]

    for intent in INTENTS:
        node("Intent", intent)
    for d in DESIGN_TYPES:
        node("DesignType", d)
    for objs, acts in INTENTS.values():
        for o in objs:
            node("SceneObject", o)
        for a in acts:
            node("Action", a)

    edges: list[dict] = []
    for intent, (objs, acts) in INTENTS.items():
        iid = ids[("Intent", intent)]
        for d in sorted(rng.sample(DESIGN_TYPES, rng.randint(16, 26))):
            edges.append({"record_type": "edge", "src": iid, "dst": ids[("DesignType", d)], "relation": "designed_as"})
        extra = [o for o in rng.sample(GENERIC_OBJECTS, 5) if o not in objs]
        for o in objs + extra:
            edges.append({"record_type": "edge", "src": iid, "dst": node("SceneObject", o), "relation": "features"})
        for a in acts:
            edges.append({"record_type": "edge", "src": iid, "dst": ids[("Action", a)], "relation": "involves"})
        # an object is acted on when the action names it, e.g. Cut a cake -> Cake
        for a in acts:
            for o in objs:
                if o.lower().rstrip("s") in a.lower():
                    edges.append({"record_type": "edge", "src": ids[("Action", a)], "dst": ids[("SceneObject", o)], "relation": "uses"})
    seen = set()
    for e in edges:
        key = (e["src"], e["dst"])
        if key not in seen:
            seen.add(key)
            rows.append(e)
    return rows


def build_assets(rng: random.Random) -> list[dict]:
    rows = [
        {
            "asset_id": "img-sample-0001",
            "kind": "Image",
            "title": "Tropical frangipani flowers floating",
            "keywords": ["flower", "frangipani", "paradise", "turquoise", "tranquil", "tropical", "summer"],
            "gentech": False,
            "locale": "en-US",
            "aspect_ratio": "3:2",
        },
        {
            "asset_id": "tpl-sample-0001",
            "kind": "Template",
            "title": "Galaxy Minecraft Server Banner",
            "topics": ["galactic", "space", "server banner"],
            "locale": "en-US",
            "aspect_ratio": "16:9",
        },
    ]
    titles = {r["title"] for r in rows}
    n = 1
    while n < 1500:
        subject = rng.choice(IMAGE_SUBJECTS)
        parts = [rng.choice(ADJECTIVES) if rng.random() < 0.4 else "", subject, rng.choice(IMAGE_TAILS), rng.choice(PLACES) if rng.random() < 0.6 else ""]
        title = " ".join(p for p in parts if p).strip()
        title = title[:1].upper() + title[1:]
        if title in titles:
            continue
        titles.add(title)
        n += 1
        kw = [w for w in subject.lower().split() if len(w) > 2] + rng.sample(
            ["summer", "nature", "cozy", "festive", "minimal", "bright", "calm", "travel", "food", "celebration", "texture", "light"], 3
        )
        rows.append({
            "asset_id": f"img-{n:04d}",
            "kind": "Image",
            "title": title,
            "keywords": kw,
            "gentech": rng.random() < 0.4,
            "locale": rng.choice(LOCALES),
            "aspect_ratio": rng.choice(RATIOS),
            "ctr": round(rng.uniform(0.001, 0.08), 4),
        })
    n = 1
    while n < 1500:
        theme = rng.choice(TEMPLATE_THEMES + list(INTENTS))
        design = rng.choice(TEMPLATE_DESIGNS)
        lead = rng.choice(ADJECTIVES + STYLES) if rng.random() < 0.5 else ""
        title = " ".join(p for p in (lead, theme, design) if p)
        if title in titles:
            continue
        titles.add(title)
        n += 1
        topics = [theme.lower(), design.lower()] + rng.sample(["modern", "bold", "fun", "business", "event", "social media", "print", "sale"], 2)
        rows.append({
            "asset_id": f"tpl-{n:04d}",
            "kind": "Template",
            "title": title,
            "topics": topics,
            "locale": rng.choice(LOCALES),
            "aspect_ratio": rng.choice(RATIOS),
        })
    return rows


# golden content-type counts and function split
CONTENT_COUNTS = {
    "Template": 103, "Photo": 97, "Audio": 20, "Video": 19, "Background": 20, "DesignAsset": 17, "Text": 20, "Any": 164,
}
SEARCH_TOTAL = 237

SEED_EXAMPLES = [
    ("Find me a birthday template with balloons and confetti", "Search", "Template", "birthday balloons confetti"),
    ("Create an elegant wedding invitation with gold floral borders for a December ceremony", "Generate", "Template",
     "elegant wedding invitation gold floral borders December ceremony"),
    ("Show me tropical beach backgrounds", "Search", "Background", "tropical beach background"),
    ("Generate a podcast cover with neon colors and retro style", "Generate", "DesignAsset", "podcast cover neon colors retro style"),
    ("Find business presentation templates with data charts", "Search", "Template", "business presentation data charts"),
]

CT_NOUN = {
    "Template": ["template", "templates", "flyer template", "invitation template"],
    "Photo": ["photo", "image", "picture", "photos", "images"],
    "Audio": ["audio", "music track", "sound effect", "song"],
    "Video": ["video", "video clip", "animation", "videos"],
    "Background": ["background", "backgrounds", "backdrop"],
    "DesignAsset": ["icon", "sticker", "illustration", "graphic", "clipart"],
    "Text": ["text effect", "font", "heading", "quote text"],
    "Any": [""],
}
SEARCH_OPEN = ["find", "find me", "show me", "search for", "look for", "i need", "", "any", "get me"]
GEN_OPEN = ["create", "generate", "make", "design", "make me", "i want", "can you create", "please make"]
GEN_EXTRAS = [
    "with {o1} and {o2}", "for my {rel}'s {intent}", "in a {style} style", "using {c1} and {c2} colors",
    "with space for a short message", "that feels {mood}", "on a {c1} background", "featuring {o1}",
    "for a {intent} party next weekend", "with bold lettering that says happy {intent}",
]
RELS = ["son", "daughter", "nephew", "niece", "mom", "dad", "best friend", "sister", "brother", "coworker"]
COLORS = ["gold", "navy", "pink", "emerald", "teal", "black", "cream", "coral", "lavender", "silver", "red", "blue"]
MOODS = ["warm", "fun", "calm", "luxurious", "energetic", "heartfelt", "professional", "cozy"]


def golden_row(rng: random.Random, function: str, ct: str) -> tuple[str, str]:
    intent = rng.choice(list(INTENTS))
    objs = INTENTS[intent][0]
    o1, o2 = rng.sample(objs, 2)
    noun = rng.choice(CT_NOUN[ct])
    il = intent.lower()
    if function == "Search":
        opener = rng.choice(SEARCH_OPEN)
        shape = rng.randrange(4)
        if shape == 0:
            body = f"{il} {noun} with {o1.lower()}"
            sub = f"{il} {o1.lower()}"
        elif shape == 1:
            body = f"{o1.lower()} {noun}" if noun else f"{o1.lower()} for {il}"
            sub = f"{o1.lower()} {il}" if not noun else o1.lower()
        elif shape == 2:
            body = f"{noun} for {il}" if noun else f"{il} ideas"
            sub = il
        else:
            adj = rng.choice(ADJECTIVES).lower()
            body = f"{adj} {il} {noun}".strip()
            sub = f"{adj} {il}"
        query = " ".join(" ".join(p for p in (opener, body) if p).split())
        if noun:
            sub = f"{sub} {noun.split()[-1]}" if shape != 1 else f"{sub} {noun.split()[-1]}"
        sub = " ".join(sub.split())
    else:
        opener = rng.choice(GEN_OPEN)
        adj = rng.choice(ADJECTIVES).lower()
        singular = [x for x in CT_NOUN[ct] if x and not x.endswith("s")]
        head = rng.choice(singular) if singular else rng.choice(["design", "something", "graphic"])
        art = "an" if adj[0] in "aeiou" else "a"
        parts = [opener, art, adj, head, "for", il]
        sub_parts = [adj, head, il]
        for extra in rng.sample(GEN_EXTRAS, rng.randint(1, 3)):
            filled = extra.format(
                o1=o1.lower(), o2=o2.lower(), rel=rng.choice(RELS), intent=il, style=rng.choice(STYLES).lower(),
                c1=rng.choice(COLORS), c2=rng.choice(COLORS), mood=rng.choice(MOODS),
            )
            parts.append(filled)
            sub_parts.extend(w for w in filled.split() if w not in {"with", "for", "my", "a", "in", "and", "on", "that", "using", "feels", "says", "featuring", "next"})
        query = " ".join(parts)
        sub = " ".join(dict.fromkeys(" ".join(sub_parts).split()))
    query = query[:1].upper() + query[1:]
    return query, sub


def build_golden(rng: random.Random) -> list[dict]:
    # Search share per content type, chosen so Search totals 237
    search_quota = {"Template": 55, "Photo": 70, "Audio": 12, "Video": 11, "Background": 14, "DesignAsset": 6, "Text": 9, "Any": 60}
    assert sum(search_quota.values()) == SEARCH_TOTAL
    rows: list[dict] = []
    seen = set()
    counts = Counter()
    for q, fn, ct, sub in SEED_EXAMPLES:
        rows.append({"query": q, "function": fn, "content_type": ct, "subprompt": sub})
        seen.add(q.lower())
        counts[(fn, ct)] += 1
    for ct, total in CONTENT_COUNTS.items():
        for fn, want in (("Search", search_quota[ct]), ("Generate", total - search_quota[ct])):
            while counts[(fn, ct)] < want:
                q, sub = golden_row(rng, fn, ct)
                if q.lower() in seen:
                    continue
                seen.add(q.lower())
                counts[(fn, ct)] += 1
                rows.append({"query": q, "function": fn, "content_type": ct, "subprompt": sub})
    head, rest = rows[:5], rows[5:]
    rng.shuffle(rest)
    return head + rest


def write_jsonl(path: Path, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in rows:
            fh.write(json.dumps(r, ensure_ascii=False) + "\n")


def main() -> None:
    write_jsonl(DATA / "kg.jsonl", build_kg(random.Random(SEED)))
    write_jsonl(DATA / "assets.jsonl", build_assets(random.Random(SEED + 1)))
    golden = build_golden(random.Random(SEED + 2))
    write_jsonl(DATA / "golden.jsonl", golden)
    fn = Counter(r["function"] for r in golden)
    ct = Counter(r["content_type"] for r in golden)
    print(f"golden: {len(golden)} rows, {dict(fn)}, {dict(ct)}")


if __name__ == "__main__":
    main()
