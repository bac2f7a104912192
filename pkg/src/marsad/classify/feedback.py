"""Annotation feedback loop for the sentiment baseline.

Relabels never retrain a model here; they grow the lexicon.  A token enters
the side matching the new label once at least ``min_agreement`` annotations
agree, it is unique to the annotated posts' vocabulary (not already in
either polarity), and no equal-strength disagreement exists.  Applying the
same annotation set twice is a no-op the second time.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .sentiment import Lexicon

MIN_AGREEMENT = 3


def apply_feedback(
    annotations: Sequence,
    lexicon: Lexicon,
    tokens_by_post: Mapping[str, Sequence[str]],
    min_agreement: int = MIN_AGREEMENT,
) -> tuple[Lexicon, dict]:
    """Fold sentiment relabels into a new lexicon version.

    ``annotations`` need ``kind``, ``post_id`` and ``new_label`` attributes;
    non-sentiment or neutral relabels are ignored.  Returns the (possibly
    identical-content, version-bumped only when changed) lexicon plus a
    report of added tokens.
    """
    counts: dict[str, dict[str, int]] = {}
    for a in annotations:
        if a.kind != "sentiment" or a.new_label not in ("positive", "negative"):
            continue
        tokens = set(tokens_by_post.get(a.post_id, ()))
        for token in tokens:
            if token in lexicon.positive or token in lexicon.negative:
                continue
            per_label = counts.setdefault(token, {})
            per_label[a.new_label] = per_label.get(a.new_label, 0) + 1

    add_pos: list[str] = []
    add_neg: list[str] = []
    for token, per_label in sorted(counts.items()):
        pos_n = per_label.get("positive", 0)
        neg_n = per_label.get("negative", 0)
        if pos_n >= min_agreement and pos_n > neg_n:
            add_pos.append(token)
        elif neg_n >= min_agreement and neg_n > pos_n:
            add_neg.append(token)

    report = {"added_positive": add_pos, "added_negative": add_neg}
    if not add_pos and not add_neg:
        return lexicon, report
    return lexicon.evolve(add_positive=add_pos, add_negative=add_neg), report
