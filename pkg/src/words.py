"""
The monoid on letters l, n, f and its node-decorated multimonoid

Relations fl = nf, fn = lf, ff = 1 make every element uniquely a free word
over {l, n} optionally followed by a single f. Words are always stored in
that normal form, so equality is structural.
"""

from dataclasses import dataclass, field
from typing import Iterable, Optional

from src.errors import NodeMismatchError, NotAPrefixError, ParseError


_SWAP = str.maketrans('ln', 'nl')


def swap_letters(body: str) -> str:
    """Exchange l and n."""
    return body.translate(_SWAP)


@dataclass(frozen=True)
class Word:
    """Normal form: body over {l, n} and a trailing-f flag."""
    body: str = ''
    flip: bool = False

    def __post_init__(self):
        if any(ch not in 'ln' for ch in self.body):
            raise ParseError(f"word body must be over l, n: {self.body!r}")

    @property
    def grade(self) -> int:
        return len(self.body)

    @property
    def is_empty(self) -> bool:
        return not self.body and not self.flip

    def __str__(self) -> str:
        text = self.body + ('f' if self.flip else '')
        return text or 'e'

    def __mul__(self, other: 'Word') -> 'Word':
        return concat(self, other)


EPSILON = Word()
F_WORD = Word('', True)


def normalize(raw: Iterable[str]) -> Word:
    """
    Rewrite a raw letter sequence into normal form.

    Args:
        raw: letters from {l, n, f}; 'e' and whitespace are ignored

    Returns:
        Normal-form Word
    """
    parity = False
    out = []
    for ch in raw:
        if ch in 'e \t':
            continue
        if ch == 'f':
            parity = not parity
        elif ch in 'ln':
            # every pending f moves past this letter, swapping it
            out.append(swap_letters(ch) if parity else ch)
        else:
            raise ParseError(f"unknown letter {ch!r} in word {raw!r}")
    return Word(''.join(out), parity)


def parse_word(text: str) -> Word:
    return normalize(text)


def concat(a: Word, b: Word) -> Word:
    body = b.body if not a.flip else swap_letters(b.body)
    return Word(a.body + body, a.flip != b.flip)


def sharp(w: Word) -> Word:
    """
    The involution: write backwards, exchange l with n, push f to the end.

    A trailing f moves to the front when reversed and then cancels the
    exchange on its way back.
    """
    if w.flip:
        return Word(w.body[::-1], True)
    return Word(swap_letters(w.body[::-1]), False)


def left_quotient(prefix: Word, whole: Word) -> Word:
    """
    The unique r with concat(prefix, r) == whole.

    Raises:
        NotAPrefixError: if no such r exists
    """
    if not whole.body.startswith(prefix.body):
        raise NotAPrefixError(f"{prefix} is not a prefix of {whole}")
    rest = whole.body[len(prefix.body):]
    if prefix.flip:
        rest = swap_letters(rest)
    return Word(rest, prefix.flip != whole.flip)


def is_prefix(prefix: Word, whole: Word) -> bool:
    return whole.body.startswith(prefix.body)


@dataclass(frozen=True)
class Arrow:
    """Element i sigma j of the multimonoid; the label does not take part in equality."""
    source: int
    word: Word
    target: int
    label: Optional[str] = field(default=None, compare=False)

    @property
    def grade(self) -> int:
        return self.word.grade

    def to_text(self) -> str:
        return f"{self.source}:{self.word}:{self.target}"

    def __str__(self) -> str:
        return self.label or self.to_text()


def parse_arrow(text: str, label: Optional[str] = None) -> Arrow:
    """Parse "<i>:<word>:<j>"."""
    parts = text.split(':')
    if len(parts) != 3:
        raise ParseError(f"arrow must look like i:word:j, got {text!r}")
    try:
        source, target = int(parts[0]), int(parts[2])
    except ValueError as e:
        raise ParseError(f"bad node index in {text!r}") from e
    word = normalize(parts[1]) if parts[1] not in ('', 'e') else EPSILON
    return Arrow(source, word, target, label)


def arrow_product(a: Arrow, b: Arrow) -> Arrow:
    if a.target != b.source:
        raise NodeMismatchError(f"cannot compose {a.to_text()} with {b.to_text()}")
    return Arrow(a.source, concat(a.word, b.word), b.target)


def arrow_sharp(a: Arrow) -> Arrow:
    return Arrow(a.target, sharp(a.word), a.source, a.label)


def is_parabolic(a: Arrow) -> bool:
    """True for i l^k i and i n^k i with k >= 1."""
    body = a.word.body
    return (a.source == a.target and not a.word.flip and len(body) >= 1
            and len(set(body)) == 1)


def identity_arrow(node: int) -> Arrow:
    return Arrow(node, EPSILON, node)


def demo():
    """Show the rewriting rules at work."""
    for raw in ("fl", "ff", "lnffn", "nfnf"):
        print(f"{raw:8s} -> {normalize(raw)}")
    print(f"sharp(lnf) = {sharp(normalize('lnf'))}")


if __name__ == '__main__':
    demo()
