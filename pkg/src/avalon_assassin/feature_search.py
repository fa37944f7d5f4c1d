"""Exhaustive powerset search over the engineered statistic catalog,
scoring every non-empty subset by cross-validated linear-SVC accuracy."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .evaluation import kfold_split
from .features import STAT_IDS, engineered_matrix, normalize_subset
from .game_model import NUM_PLAYERS
from .log_ingest import GameStream
from .svm import EmptyDataset, masked_argmax, train_linear_svc, decision_scores


class EmptyCandidates(ValueError):
    pass


@dataclass(frozen=True)
class SubsetScore:
    subset: tuple[str, ...]
    mean_accuracy: float
    fold_accuracies: tuple[float, ...]


@dataclass(frozen=True)
class SearchResult:
    ranking: tuple[SubsetScore, ...]
    best_subset: tuple[str, ...]
    total_subsets_evaluated: int
    seed: int


def _rank_key(score: SubsetScore):
    # mean accuracy descending, ties to smaller subsets, then lexicographic
    return (-score.mean_accuracy, len(score.subset), score.subset)


def powerset_search(stream: GameStream, candidates=STAT_IDS, folds: int = 10,
                    seed: int = 0, svc_params: dict | None = None) -> SearchResult:
    if not candidates:
        raise EmptyCandidates("need at least one candidate statistic")
    candidates = normalize_subset(candidates)
    n = len(stream.games)
    if n == 0:
        raise EmptyDataset("empty stream")
    svc_params = dict(svc_params or {})

    # one stat-table pass; each subset is a column slice of the full matrix
    X_full, y, masks = engineered_matrix(stream, candidates)
    plan = kfold_split(n, folds, seed)  # identical folds for every subset

    scores = []
    for size in range(1, len(candidates) + 1):
        for subset in combinations(candidates, size):
            cols = [
                seat * len(candidates) + candidates.index(s)
                for seat in range(NUM_PLAYERS)
                for s in subset
            ]
            X = np.ascontiguousarray(X_full[:, cols])
            fold_accs = []
            for fold in plan.folds:
                test_idx = np.asarray(fold, dtype=np.int64)
                train_mask = np.ones(n, dtype=bool)
                train_mask[test_idx] = False
                model = train_linear_svc(X[train_mask], y[train_mask], **svc_params)
                correct = sum(
                    1 for i in test_idx
                    if masked_argmax(decision_scores(model, X[i]), masks[i]) == y[i]
                )
                fold_accs.append(correct / len(test_idx))
            scores.append(SubsetScore(
                subset=subset,
                mean_accuracy=float(np.mean(fold_accs)),
                fold_accuracies=tuple(fold_accs),
            ))

    ranking = tuple(sorted(scores, key=_rank_key))
    return SearchResult(
        ranking=ranking,
        best_subset=ranking[0].subset,
        total_subsets_evaluated=len(scores),
        seed=seed,
    )


def search_to_csv(result: SearchResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    max_folds = max(len(s.fold_accuracies) for s in result.ranking)
    writer.writerow(["subset", "mean_accuracy"] + [f"fold{i}" for i in range(max_folds)])
    for score in result.ranking:
        writer.writerow(["+".join(score.subset), repr(score.mean_accuracy)]
                        + [repr(a) for a in score.fold_accuracies])
    return buf.getvalue()


def search_summary(result: SearchResult, top: int = 10) -> str:
    lines = [
        f"subsets evaluated: {result.total_subsets_evaluated} (seed {result.seed})",
        f"best subset: {'+'.join(result.best_subset)} "
        f"(mean accuracy {result.ranking[0].mean_accuracy:.4f})",
        "top subsets:",
    ]
    for score in result.ranking[:top]:
        lines.append(f"  {score.mean_accuracy:.4f}  {'+'.join(score.subset)}")
    return "\n".join(lines) + "\n"
