"""Writes the subset of a wink-embeddings JSON table (GloVe 6B, 100d) that
covers the vocabulary of a pre-tagged corpus, in plain-text vector format.

    python3 extract_vectors.py wink-embeddings-sg-100d.json book.tsv > vectors.txt
"""
import json
import sys


def main():
    table = json.load(open(sys.argv[1]))
    dims = table["dimensions"]
    vocab = set()
    for line in open(sys.argv[2], encoding="utf-8"):
        line = line.rstrip("\n")
        if not line:
            continue
        surface, lemma, _pos = line.split("\t")
        vocab.add(surface.lower())
        vocab.add(lemma.lower())
    vectors = table["vectors"]
    out = sys.stdout
    for word in table["words"]:
        if word in vocab and word in vectors:
            values = vectors[word][:dims]
            out.write(word + " " + " ".join(format(v, ".5g") for v in values) + "\n")


if __name__ == "__main__":
    main()
