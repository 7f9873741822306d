"""Walkthrough: from raw text to tokens, vocabulary, and sentence embeddings.

Run with: python3 demos/01_tokenize_and_embed.py
"""

import tempfile
from pathlib import Path

import numpy as np

from ffdistill import build_vocab, embed_sentence, embedding_distance, init_table, tokenize
from ffdistill.embedding import export_embedding_heatmap
from ffdistill.tokenizer import token_set

# --- tokenization ----------------------------------------------------------
# Chinese characters and lower-cased ASCII words become unigrams; every
# adjacent pair plus the ^/$ boundaries becomes a bigram.

for text in ["mac电脑", "Red SWEATER", "华为x8手机外壳"]:
    seq = tokenize(text)
    print(f"{text!r}")
    print(f"  unigrams: {seq.unigrams}")
    print(f"  bigrams:  {seq.bigrams}")

# --- vocabulary ------------------------------------------------------------
# Both sides of each pair contribute counts; tokens below min_count drop out
# and ids follow (count desc, byte asc) order, so builds are reproducible.

corpus = [
    ("mac电脑", "apple mac电脑 pro 13"),
    ("mac电脑", "mac电脑 二手"),
    ("red sweater", "red wool sweater"),
    ("red sweater", "red knit sweater women"),
    ("毛衣", "红色 毛衣 女"),
    ("毛衣", "黑色 毛衣"),
]
vocab = build_vocab(corpus, min_count=2)
print(f"\nvocab: {vocab.size} tokens kept at min_count=2")
for token in list(vocab.tokens)[:8]:
    print(f"  id={vocab.lookup(token):<3d} count={vocab.count(token):<3d} {token}")

# --- sentence embeddings ---------------------------------------------------
# Each sentence is the sum of its in-vocab token vectors divided by sqrt(n).
# Before training the table is random, so distances are meaningless; after
# training (see demo 02) related texts move together.

table = init_table(vocab.size, dim=16, seed=0)
red = embed_sentence(tokenize("red sweater"), vocab, table)
mac = embed_sentence(tokenize("mac电脑"), vocab, table)
print(f"\n'red sweater': {red.retained_count} retained tokens")
print(f"'mac电脑':      {mac.retained_count} retained tokens")
for metric in ("cosine", "euclidean", "manhattan"):
    print(f"  {metric:<10} {embedding_distance(red, mac, metric):.4f}")

# All-OOV text embeds to the zero vector instead of failing:
oov = embed_sentence(tokenize("qqqq zzzz"), vocab, table)
print(f"all-OOV text -> zero vector: {not oov.vector.any()}, n={oov.retained_count}")

# --- heatmap export --------------------------------------------------------
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "heatmap.tsv"
    export_embedding_heatmap(["red sweater", "mac电脑", "毛衣"], vocab, table, path)
    print(f"\nheatmap rows ({path.name}):")
    for line in path.read_text(encoding="utf-8").splitlines()[:2]:
        cells = line.split("\t")
        print("  " + "\t".join(cells[:4]) + ("\t…" if len(cells) > 4 else ""))
