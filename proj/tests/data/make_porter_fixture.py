"""Regenerates porter_fixture.tsv with NLTK's implementation of the original
Porter algorithm, which serves as the independent reference.

usage: make_porter_fixture.py [TEXT_FILE ...]
Words of three or more letters from the given files join the built-in list."""
import re
import sys
from pathlib import Path

from nltk.stem.porter import PorterStemmer

CLASSIC = """caresses ponies ties caress cats feed agreed plastered bled motoring sing
conflated troubled sized hopping tanned falling hissing fizzed failing filing happy sky
relational conditional rational valenci hesitanci digitizer conformabli radicalli
differentli vileli analogousli vietnamization predication operator feudalism
decisiveness hopefulness callousness formaliti sensitiviti sensibiliti triplicate
formative formalize electriciti electrical hopeful goodness revival allowance inference
airliner gyroscopic adjustable defensible irritant replacement adjustment dependent
adoption homologou communism activate angulariti homologous effective bowdlerize
probate rate cease controll roll generalizations oscillators a is by dying lying
agreement skies spied news innings outing canning proceed exceed succeed""".split()


def main() -> None:
    words = set(CLASSIC)
    for name in sys.argv[1:]:
        words.update(re.findall(r"[a-z]{3,}", Path(name).read_text(encoding="utf-8").lower()))
    stemmer = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)
    out = Path(__file__).with_name("porter_fixture.tsv")
    with out.open("w", encoding="utf-8") as f:
        for w in sorted(words):
            f.write(f"{w}\t{stemmer.stem(w, to_lowercase=False)}\n")
    print(f"{len(words)} words", file=sys.stderr)


if __name__ == "__main__":
    main()
