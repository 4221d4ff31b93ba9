"""Streaming reader/writer for the 10-column CoNLL-U interchange format.

Sentences are the unit of everything downstream (splitting, ablation,
training), so the reader never buffers more than one sentence block.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, TextIO

logger = logging.getLogger(__name__)

N_COLUMNS = 10


class CorpusWriteError(IOError):
    """I/O failure while writing; carries the id of the last sentence written."""


@dataclass(frozen=True)
class ReadIssue:
    """One recoverable problem found while reading; the block it names was skipped."""

    block: int  # 1-based ordinal of the offending sentence block
    line: int  # 1-based line number where the problem was detected
    message: str

    def __str__(self) -> str:
        return f"block {self.block}, line {self.line}: {self.message}"


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    lemma: str
    upos: str = "_"
    head: int | None = None
    deprel: str | None = None


@dataclass
class Sentence:
    id: str
    tokens: list[Token]
    source: str = ""

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def has_parse(self) -> bool:
        return bool(self.tokens) and all(t.head is not None for t in self.tokens)

    def lemmas(self) -> list[str]:
        return [t.lemma for t in self.tokens]


def validate_sentence(sentence: Sentence) -> str | None:
    """Return a diagnostic string if the sentence violates an invariant, else None."""
    n = len(sentence.tokens)
    if n == 0:
        return "sentence has no tokens"
    for pos, tok in enumerate(sentence.tokens, start=1):
        if tok.index != pos:
            return f"token indices not contiguous at position {pos} (got {tok.index})"
        if not tok.lemma:
            return f"empty lemma at token {pos}"
        if tok.lemma != tok.lemma.casefold():
            return f"lemma not case-folded at token {pos}: {tok.lemma!r}"
    headed = [t for t in sentence.tokens if t.head is not None]
    if headed and len(headed) != n:
        return "mixed annotation: some tokens have heads, some do not"
    if headed:
        roots = 0
        for tok in sentence.tokens:
            if tok.head < 0 or tok.head > n:
                return f"head {tok.head} out of range at token {tok.index}"
            if tok.head == tok.index:
                return f"token {tok.index} is its own head"
            if tok.head == 0:
                roots += 1
        if roots != 1:
            return f"expected exactly one root, found {roots}"
    return None


def _default_issue_handler(issue: ReadIssue) -> None:
    logger.warning("skipped sentence: %s", issue)


def _parse_block(
    rows: list[tuple[int, str]],
    comments: dict[str, str],
    block_no: int,
) -> tuple[Sentence | None, ReadIssue | None]:
    tokens: list[Token] = []
    for line_no, raw in rows:
        cols = raw.split("\t")
        if len(cols) != N_COLUMNS:
            return None, ReadIssue(
                block_no, line_no, f"expected {N_COLUMNS} columns, got {len(cols)}"
            )
        tok_id = cols[0]
        if "-" in tok_id or "." in tok_id:
            # multiword-token range or empty node: skip the row, keep components
            continue
        try:
            index = int(tok_id)
        except ValueError:
            return None, ReadIssue(block_no, line_no, f"non-integer token id {tok_id!r}")
        head: int | None
        if cols[6] == "_":
            head = None
        else:
            try:
                head = int(cols[6])
            except ValueError:
                return None, ReadIssue(block_no, line_no, f"non-integer head {cols[6]!r}")
        lemma = cols[2]
        if lemma == "_" or not lemma:
            return None, ReadIssue(block_no, line_no, f"missing lemma for token {tok_id}")
        deprel = None if cols[7] == "_" else cols[7]
        tokens.append(
            Token(
                index=index,
                form=cols[1],
                lemma=lemma.casefold(),
                upos=cols[3],
                head=head,
                deprel=deprel,
            )
        )
    sentence = Sentence(
        id=comments.get("sent_id", f"s{block_no}"),
        tokens=tokens,
        source=comments.get("source", ""),
    )
    problem = validate_sentence(sentence)
    if problem is not None:
        first_line = rows[0][0] if rows else 0
        return None, ReadIssue(block_no, first_line, problem)
    return sentence, None


def read_conllu(
    lines: Iterable[str],
    on_issue: Callable[[ReadIssue], None] | None = None,
) -> Iterator[Sentence]:
    """Yield sentences from CoNLL-U lines, skipping bad blocks via ``on_issue``.

    Bad blocks (wrong column count, out-of-range heads, missing lemmas) are
    reported through the handler and never silently dropped; file order is
    preserved for the rest.
    """
    handler = on_issue or _default_issue_handler
    rows: list[tuple[int, str]] = []
    comments: dict[str, str] = {}
    block_no = 0
    line_no = 0

    def flush() -> Sentence | None:
        nonlocal block_no
        if not rows and not comments:
            return None
        block_no += 1
        sentence, issue = _parse_block(rows, comments, block_no)
        rows.clear()
        comments.clear()
        if issue is not None:
            handler(issue)
            return None
        return sentence

    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            sentence = flush()
            if sentence is not None:
                yield sentence
        elif line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                comments[key.strip()] = value.strip()
        else:
            rows.append((line_no, line))
    sentence = flush()
    if sentence is not None:
        yield sentence


def read_conllu_file(
    path, on_issue: Callable[[ReadIssue], None] | None = None
) -> Iterator[Sentence]:
    with open(path, encoding="utf-8") as handle:
        yield from read_conllu(handle, on_issue=on_issue)


def format_sentence(sentence: Sentence) -> str:
    lines = [f"# sent_id = {sentence.id}"]
    if sentence.source:
        lines.append(f"# source = {sentence.source}")
    for tok in sentence.tokens:
        head = "_" if tok.head is None else str(tok.head)
        deprel = tok.deprel if tok.deprel is not None else "_"
        lines.append(
            "\t".join(
                (str(tok.index), tok.form, tok.lemma, tok.upos, "_", "_", head, deprel, "_", "_")
            )
        )
    lines.append("")
    return "\n".join(lines) + "\n"


def write_conllu(sentences: Iterable[Sentence], out: TextIO) -> int:
    """Write sentences as CoNLL-U blocks; returns the number of bytes written."""
    written = 0
    last_id = None
    for sentence in sentences:
        block = format_sentence(sentence)
        try:
            out.write(block)
        except OSError as exc:
            raise CorpusWriteError(
                f"write failed after sentence {last_id!r}: {exc}"
            ) from exc
        written += len(block.encode("utf-8"))
        last_id = sentence.id
    return written


def write_conllu_file(sentences: Iterable[Sentence], path) -> int:
    with open(path, "w", encoding="utf-8") as handle:
        return write_conllu(sentences, handle)
