"""Writes data/toy: a small Polish-style offer dump with two categories."""

import csv
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "toy"

BRANDS = {
    "Chemia domowa": ["Ludwik", "Domestos", "Cif", "Vizir", "Persil", "Lenor", "Pur", "Fairy", "Ajax", "Bref"],
    "Napoje": ["Tymbark", "Żywiec Zdrój", "Cisowianka", "Hortex", "Kubuś", "Pepsi", "Tiger", "Nałęczowianka"],
}
KINDS = {
    "Chemia domowa": ["płyn do naczyń", "żel do prania", "proszek do prania", "płyn do płukania", "mleczko do czyszczenia",
                      "kostka do WC", "spray łazienka", "kapsułki do zmywarki"],
    "Napoje": ["woda niegazowana", "woda gazowana", "sok jabłkowy", "nektar pomarańczowy", "napój energetyczny",
               "napój gazowany cola", "sok multiwitamina", "herbata mrożona"],
}
VARIANTS = ["cytrynowy", "miętowy", "lawenda", "original", "sensitive", "brzoskwinia", "zielone jabłko", "classic"]
SIZES = ["0,5L", "1L", "1,5L", "450ml", "750 ml", "900g", "1,35kg", "6x1,5L", "20 szt."]
SHOPS = ["Auchan", "Carrefour", "Frisco", "Rossmann", "Hebe", "Biedronka", "Kaufland"]
RAW_CATEGORY = {"Chemia domowa": ["Chemia domowa", "CHEMIA", "chemia gospodarcza"], "Napoje": ["Napoje", "NAPOJE", "napoje bezalkoholowe"]}


def main():
    rng = random.Random(2024)
    rows = []
    ean = 5900000100000
    for category in ("Chemia domowa", "Napoje"):
        for _ in range(140):
            base = [rng.choice(BRANDS[category]), rng.choice(KINDS[category]), rng.choice(VARIANTS), rng.choice(SIZES)]
            for shop in rng.sample(SHOPS, rng.randint(2, 4)):
                words = list(base)
                if rng.random() < 0.3:
                    words[0] = words[0].upper()
                if rng.random() < 0.2:
                    words.pop(2)
                if rng.random() < 0.15:
                    words.append("promocja")
                rows.append([f"{shop[:3].lower()}-{len(rows):05d}", str(ean), shop, " ".join(words),
                             rng.choice(RAW_CATEGORY[category])])
            ean += 1
    # rows the cleaner drops: missing seller, a repeated (EAN, seller), a single-store EAN
    rows.append(["x-00001", str(ean - 1), "", "bez sklepu", "Napoje"])
    rows.append(["x-00002", rows[0][1], rows[0][2], rows[0][3] + " duplikat", rows[0][4]])
    rows.append(["x-00003", str(ean + 1), "Auchan", "tylko w jednym sklepie", "Napoje"])

    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "offers.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["offer_id", "ean", "shop", "name", "category"])
        w.writerows(rows)


if __name__ == "__main__":
    main()
