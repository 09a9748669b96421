#!/usr/bin/env python3
"""Regenerates data/fixture/: a 135-book Goodreads export, the matching
offline metadata file, and synthetic 64x96 PNG covers.

Output is deterministic (fixed seed); rerunning rewrites identical files.
"""
import csv
import json
import random
from pathlib import Path

from PIL import Image, ImageDraw

ROOT = Path(__file__).resolve().parent.parent / "data" / "fixture"
SEED = 135

# (genre subjects, count, default age mix)
GENRES = [
    ("fantasy", ["Fantasy", "Magic", "Epic fantasy", "Dragons", "Fairy tales"], 40),
    ("scifi", ["Science Fiction", "Space opera", "Robots", "Time travel", "First contact"], 28),
    ("dystopian", ["Dystopias", "Post-apocalyptic fiction", "Totalitarian regimes"], 15),
    ("mystery", ["Mystery", "Detective and mystery stories", "Crime", "Suspense"], 16),
    ("horror", ["Horror", "Ghost stories", "Haunted houses", "Supernatural"], 10),
    ("classics", ["Classics", "Classic literature", "Literary fiction"], 14),
    ("historical", ["Historical fiction", "World War, 1939-1945", "Victorian era"], 12),
]
AGE_SUBJECTS = {
    "Children": ["Juvenile fiction", "Picture books"],
    "MiddleGrade": ["Middle grade", "Middle-grade fiction"],
    "YoungAdult": ["Young adult fiction", "Teen"],
    "Adult": [],
}
AGE_WEIGHTS = [("Children", 6), ("MiddleGrade", 40), ("YoungAdult", 42), ("Adult", 12)]

ADJ = ["Silver", "Hollow", "Burning", "Silent", "Shattered", "Crimson", "Midnight", "Iron", "Lost", "Glass",
       "Wandering", "Hidden", "Frozen", "Golden", "Last", "Drowned", "Clockwork", "Ember", "Pale", "Starless"]
NOUN = ["Crown", "Harbor", "Archive", "Orchard", "Lantern", "Meridian", "Citadel", "Garden", "Signal", "Tide",
        "Engine", "Compass", "Library", "Forest", "Mirror", "Kingdom", "Station", "Cipher", "Beacon", "Labyrinth"]
FIRST = ["Ada", "Rowan", "Elias", "Mira", "Tobias", "Selene", "Jonah", "Priya", "Felix", "Imogen", "Caleb",
         "Nadia", "Oren", "Lucia", "Marcus", "Wren", "Hugo", "Esme", "Theo", "Ines"]
LAST = ["Ashford", "Bellweather", "Castellan", "Dunmore", "Everly", "Fairbairn", "Greaves", "Halloway",
        "Ingram", "Jessop", "Kestrel", "Lockhart", "Marlowe", "Northcott", "Oakes", "Pendry", "Quill",
        "Ravensworth", "Sterling", "Thorne"]
PUBLISHERS = ["Lantern House", "Meridian Press", "Harbor & Finch", "Northlight Books", "Quill Street"]
BINDINGS = [("Hardcover", 45), ("Paperback", 40), ("Mass Market Paperback", 12), ("Kindle Edition", 3)]


def weighted(rng, pairs):
    total = sum(w for _, w in pairs)
    x = rng.uniform(0, total)
    for value, w in pairs:
        x -= w
        if x <= 0:
            return value
    return pairs[-1][0]


def isbn13_check(first12):
    s = sum(int(d) * (3 if i % 2 else 1) for i, d in enumerate(first12))
    return str((10 - s % 10) % 10)


def isbn10_check(first9):
    s = sum(int(d) * (10 - i) for i, d in enumerate(first9))
    c = (11 - s % 11) % 11
    return "X" if c == 10 else str(c)


def hsv_to_rgb(h, s, v):
    import colorsys
    r, g, b = colorsys.hsv_to_rgb(h, s, v)
    return int(r * 255), int(g * 255), int(b * 255)


def make_cover(rng, path):
    img = Image.new("RGB", (64, 96), hsv_to_rgb(rng.random(), rng.uniform(0.35, 0.95), rng.uniform(0.25, 0.9)))
    d = ImageDraw.Draw(img)
    band = hsv_to_rgb(rng.random(), rng.uniform(0.1, 0.8), rng.uniform(0.6, 1.0))
    top = rng.randint(8, 40)
    d.rectangle([6, top, 57, top + rng.randint(10, 22)], fill=band)
    accent = hsv_to_rgb(rng.random(), 0.9, 0.9)
    for _ in range(rng.randint(0, 6)):
        x, y = rng.randint(0, 60), rng.randint(50, 92)
        d.ellipse([x, y, x + rng.randint(2, 6), y + rng.randint(2, 6)], fill=accent)
    img.save(path, optimize=False)


def dimensions_field(rng, binding, pages, style):
    height = {"Hardcover": 235, "Paperback": 210, "Mass Market Paperback": 175}.get(binding, 203)
    height += rng.uniform(-12, 12)
    thick = 4.0 + 0.06 * pages + rng.uniform(-3, 3)
    if style == 0:
        return {"height_mm": round(height, 1), "thickness_mm": round(max(thick, 5), 1)}
    if style == 1:
        return ("Height: %.2f Inches, Length: %.2f Inches, Weight: %.2f Pounds, Width: %.2f Inches"
                % (height / 25.4, height / 25.4 * 0.66, pages / 400, max(thick, 5) / 25.4))
    return {"length": {"unit": "inches", "value": round(height / 25.4, 2)},
            "width": {"unit": "inches", "value": round(height / 25.4 * 0.66, 2)},
            "height": {"unit": "inches", "value": round(max(thick, 5) / 25.4, 2)},
            "weight": {"unit": "pounds", "value": round(pages / 400, 2)}}


def main():
    rng = random.Random(SEED)
    (ROOT / "covers").mkdir(parents=True, exist_ok=True)
    for old in (ROOT / "covers").glob("*.png"):
        old.unlink()

    rows, books = [], []
    seq = 0
    series_count = {}
    for genre, subjects, count in GENRES:
        for _ in range(count):
            seq += 1
            first9 = "19990" + "%04d" % seq
            isbn10 = first9 + isbn10_check(first9)
            isbn13 = "978" + first9 + isbn13_check("978" + first9)
            title = "The %s %s" % (rng.choice(ADJ), rng.choice(NOUN)) if rng.random() < 0.5 else \
                "%s of the %s" % (rng.choice(NOUN), rng.choice(ADJ) + " " + rng.choice(NOUN))
            first, last = rng.choice(FIRST), rng.choice(LAST)
            age = weighted(rng, AGE_WEIGHTS)
            if genre in ("classics", "historical") and rng.random() < 0.6:
                age = "Adult"
            display_title = title
            if rng.random() < 0.35:
                series = "%s %s" % (rng.choice(ADJ), rng.choice(["Cycle", "Chronicles", "Saga", "Trilogy"]))
                series_count[series] = series_count.get(series, 0) + 1
                idx = series_count[series]
                num = "%d" % idx if rng.random() < 0.9 else "%d.5" % idx
                display_title = "%s (%s, #%s)" % (title, series, num)
            binding = weighted(rng, BINDINGS)
            pages = rng.randint(96, 880) if rng.random() > 0.04 else 0
            avg = round(rng.uniform(2.6, 4.8), 2) if rng.random() > 0.05 else 0.0
            year = rng.randint(1890, 2024) if genre == "classics" else rng.randint(1995, 2024)
            use_isbn10_only = seq % 23 == 0
            rows.append({
                "Book Id": str(1000 + seq),
                "Title": display_title,
                "Author": "%s %s" % (first, last),
                "Author l-f": "%s, %s" % (last, first),
                "Additional Authors": "",
                "ISBN": '="%s"' % isbn10,
                "ISBN13": '=""' if use_isbn10_only else '="%s"' % isbn13,
                "My Rating": str(rng.randint(0, 5)),
                "Average Rating": "%.2f" % avg,
                "Publisher": rng.choice(PUBLISHERS),
                "Binding": binding,
                "Number of Pages": str(pages) if pages else "",
                "Year Published": str(year),
                "Original Publication Year": str(year),
                "Date Read": "",
                "Date Added": "2024/%02d/%02d" % (rng.randint(1, 12), rng.randint(1, 28)),
                "Bookshelves": "to-read" if rng.random() < 0.3 else "",
                "Bookshelves with positions": "",
                "Exclusive Shelf": rng.choice(["read", "to-read", "currently-reading"]),
                "My Review": "",
                "Spoiler": "",
                "Private Notes": "",
                "Read Count": "1",
                "Owned Copies": "1",
            })

            # A handful of rows are missing from the metadata source entirely.
            if seq % 45 == 7:
                continue
            book = {"isbn13": isbn13, "title": title, "authors": ["%s %s" % (first, last)],
                    "binding": binding, "pages": pages,
                    "subjects": rng.sample(subjects, k=min(len(subjects), rng.randint(1, 3))) + AGE_SUBJECTS[age]}
            if seq % 17 != 0:
                book["dimensions"] = dimensions_field(rng, binding, pages, seq % 3)
            if seq == 12:
                book["dimensions"] = {"height_mm": 330.0, "thickness_mm": 28.0}  # oversized art edition
                book["title"] += " (Illustrated Edition)"
            if seq % 29 != 0:
                cover = "covers/%s.png" % isbn13
                make_cover(rng, ROOT / cover)
                book["image"] = cover
            books.append(book)

    with open(ROOT / "goodreads_library_export.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.DictWriter(f, fieldnames=list(rows[0].keys()), quoting=csv.QUOTE_MINIMAL)
        w.writeheader()
        w.writerows(rows)
    with open(ROOT / "metadata.json", "w", encoding="utf-8") as f:
        json.dump({"books": books}, f, indent=1)
        f.write("\n")
    print("wrote %d rows, %d metadata records" % (len(rows), len(books)))


if __name__ == "__main__":
    main()
