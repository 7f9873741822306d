"""Character/word unigram+bigram tokenization for mixed Chinese/English text.

Unigrams are single CJK ideographs and maximal runs of ASCII letters
(lower-cased). Everything else — digits, punctuation, whitespace, other
scripts, and the reserved boundary marks — separates tokens and emits
nothing. Each adjacent unigram pair forms a bigram, plus one begin-boundary
and one end-boundary bigram per non-empty text.
"""

from __future__ import annotations

from dataclasses import dataclass

BEGIN_MARK = "^"
END_MARK = "$"

# Joins two adjacent alphabetic-word unigrams into a bigram. Word pairs need
# an explicit seam ("red"+"sweater" must not read as one word); CJK-adjacent
# pairs concatenate directly. U+241F cannot occur inside any unigram, so the
# default never collides with token text.
DEFAULT_JOINER = "␟"

# Unified ideographs plus extension A. Other scripts are separators.
_CJK_RANGES = ((0x4E00, 0x9FFF), (0x3400, 0x4DBF))


def _is_cjk(ch: str) -> bool:
    code = ord(ch)
    return any(lo <= code <= hi for lo, hi in _CJK_RANGES)


def _is_ascii_alpha(ch: str) -> bool:
    return ("a" <= ch <= "z") or ("A" <= ch <= "Z")


@dataclass(frozen=True)
class TokenSequence:
    """Ordered unigrams and bigrams extracted from one text.

    source_length is the unigram count of the original text; it survives
    downstream vocabulary filtering, which may drop tokens.
    """

    unigrams: list[str]
    bigrams: list[str]
    source_length: int


def tokenize(text: str, joiner: str = DEFAULT_JOINER) -> TokenSequence:
    """Split text into the unigram+bigram sequence. Never fails; empty or
    separator-only input yields an empty sequence."""
    unigrams: list[str] = []
    is_word: list[bool] = []
    run: list[str] = []

    def flush() -> None:
        if run:
            unigrams.append("".join(run).lower())
            is_word.append(True)
            run.clear()

    for ch in text:
        if _is_ascii_alpha(ch):
            run.append(ch)
        else:
            flush()
            if _is_cjk(ch):
                unigrams.append(ch)
                is_word.append(False)
            # else: separator, including literal "^" and "$"
    flush()

    bigrams: list[str] = []
    if unigrams:
        bigrams.append(BEGIN_MARK + unigrams[0])
        for i in range(len(unigrams) - 1):
            if is_word[i] and is_word[i + 1]:
                bigrams.append(unigrams[i] + joiner + unigrams[i + 1])
            else:
                bigrams.append(unigrams[i] + unigrams[i + 1])
        bigrams.append(unigrams[-1] + END_MARK)

    return TokenSequence(unigrams, bigrams, len(unigrams))


def token_set(seq: TokenSequence) -> list[str]:
    """All tokens of a sequence in lookup order: unigrams then bigrams,
    duplicates retained (a repeated token contributes once per occurrence)."""
    return seq.unigrams + seq.bigrams
