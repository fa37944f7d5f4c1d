"""K-fold cross-validation, baselines, and error-analysis tables."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .game_model import LOYAL_SERVANT, PERCIVAL, GameLog
from .log_ingest import GameStream
from .svm import masked_argmax


class BadK(ValueError):
    pass


class MissingHumanTarget(ValueError):
    pass


@dataclass(frozen=True)
class FoldPlan:
    folds: tuple[tuple[int, ...], ...]
    seed: int

    @property
    def k(self) -> int:
        return len(self.folds)


@dataclass
class EvalReport:
    fold_accuracies: list[float]
    mean_accuracy: float
    pooled_accuracy: float
    baseline_random: float | None = None
    baseline_human: float | None = None
    contingency: dict = field(default_factory=dict)
    shot_breakdown: dict = field(default_factory=dict)
    n_games: int = 0
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            # mean = unweighted average of fold accuracies; pooled =
            # total correct / total evaluated (differs when fold sizes do)
            "aggregation": "unweighted-fold-mean",
            "n_games": self.n_games,
            "seed": self.seed,
            "fold_accuracies": self.fold_accuracies,
            "mean_accuracy": self.mean_accuracy,
            "pooled_accuracy": self.pooled_accuracy,
            "baseline_random": self.baseline_random,
            "baseline_human": self.baseline_human,
            "contingency": self.contingency,
            "shot_breakdown": self.shot_breakdown,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        lines = [
            f"games evaluated: {self.n_games}",
            "accuracy aggregation: unweighted mean of fold accuracies",
            f"mean accuracy:   {self.mean_accuracy:.4f}",
            f"pooled accuracy: {self.pooled_accuracy:.4f}",
        ]
        if self.fold_accuracies:
            folds = " ".join(f"{a:.4f}" for a in self.fold_accuracies)
            lines.append(f"per-fold:        {folds}")
        if self.baseline_random is not None:
            lines.append(f"random baseline: {self.baseline_random:.4f}")
        if self.baseline_human is not None:
            lines.append(f"human baseline:  {self.baseline_human:.4f}")
        if self.contingency:
            c = self.contingency
            lines += [
                "human x model contingency:",
                f"  both correct:        {c['both_correct']}",
                f"  human only correct:  {c['human_only']}",
                f"  model only correct:  {c['model_only']}",
                f"  neither correct:     {c['neither']}",
            ]
        if self.shot_breakdown:
            s = self.shot_breakdown
            lines.append(
                f"wrong shots: Percival {s['percival']:.3f}, "
                f"LoyalServant {s['loyal_servant']:.3f} (n={s['n_wrong']})"
            )
        return "\n".join(lines) + "\n"


def kfold_split(n: int, k: int, seed: int) -> FoldPlan:
    """Seeded uniform shuffle, then contiguous partition into k folds whose
    sizes differ by at most 1."""
    if not 2 <= k <= n:
        raise BadK(f"need 2 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    base = n // k
    extra = n % k
    folds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(tuple(int(j) for j in order[start:start + size]))
        start += size
    return FoldPlan(folds=tuple(folds), seed=seed)


def _human_correct(log: GameLog) -> bool:
    if log.assassination is None:
        raise MissingHumanTarget(f"game {log.game_id} has no assassination record")
    return log.assassination.correct


def contingency_and_shots(games, model_targets) -> tuple[dict, dict]:
    counts = {"both_correct": 0, "human_only": 0, "model_only": 0, "neither": 0}
    wrong_percival = 0
    wrong_servant = 0
    for log, target in zip(games, model_targets):
        human_ok = _human_correct(log)
        model_ok = log.roles[target] == "Merlin"
        if human_ok and model_ok:
            counts["both_correct"] += 1
        elif human_ok:
            counts["human_only"] += 1
        elif model_ok:
            counts["model_only"] += 1
        else:
            counts["neither"] += 1
        if not model_ok:
            if log.roles[target] == PERCIVAL:
                wrong_percival += 1
            elif log.roles[target] == LOYAL_SERVANT:
                wrong_servant += 1
    n_wrong = wrong_percival + wrong_servant
    breakdown = {
        "percival": wrong_percival / n_wrong if n_wrong else 0.0,
        "loyal_servant": wrong_servant / n_wrong if n_wrong else 0.0,
        "n_wrong": n_wrong,
    }
    return counts, breakdown


def cross_validate(stream: GameStream, featurizer, trainer, k: int = 10,
                   seed: int = 0, with_baselines: bool = True) -> EvalReport:
    """K-fold CV over an eligible stream.

    featurizer: callable(stream) -> (X, y, masks)
    trainer:    callable(X_train, y_train) -> scorer; scorer(x) -> 5 scores
    """
    games = stream.games
    n = len(games)
    if n == 0:
        raise BadK("empty stream")
    X, y, masks = featurizer(stream)
    plan = kfold_split(n, k, seed)
    fold_accs = []
    total_correct = 0
    predictions = np.zeros(n, dtype=np.int64)
    for fold in plan.folds:
        test_idx = np.asarray(fold, dtype=np.int64)
        train_mask = np.ones(n, dtype=bool)
        train_mask[test_idx] = False
        scorer = trainer(X[train_mask], y[train_mask])
        correct = 0
        for i in test_idx:
            pred = masked_argmax(scorer(X[i]), masks[i])
            predictions[i] = pred
            if pred == y[i]:
                correct += 1
        fold_accs.append(correct / len(test_idx))
        total_correct += correct
    report = EvalReport(
        fold_accuracies=fold_accs,
        mean_accuracy=float(np.mean(fold_accs)),
        pooled_accuracy=total_correct / n,
        n_games=n,
        seed=seed,
    )
    if with_baselines:
        # fresh seeded stream, independent of the fold seed
        report.baseline_random = baseline_random(stream, seed + 1)
        if all(g.assassination is not None for g in games):
            report.baseline_human = float(
                np.mean([g.assassination.correct for g in games]))
            counts, breakdown = contingency_and_shots(games, predictions)
            report.contingency = counts
            report.shot_breakdown = breakdown
    return report


def baseline_random(stream: GameStream, seed: int) -> float:
    """Uniform shot among the 3 resistance seats of each game."""
    rng = np.random.default_rng(seed)
    games = stream.games
    if not games:
        return 0.0
    correct = 0
    for log in games:
        resistance = [s for s, r in enumerate(log.roles) if r not in ("Assassin", "Morgana")]
        target = int(rng.choice(resistance))
        if log.roles[target] == "Merlin":
            correct += 1
    return correct / len(games)


def error_analysis(predict_fn, stream: GameStream) -> EvalReport:
    """Compare a trained model's shots with the recorded human shots."""
    games = stream.games
    targets = [predict_fn(log) for log in games]
    counts, breakdown = contingency_and_shots(games, targets)
    model_correct = sum(1 for log, t in zip(games, targets) if log.roles[t] == "Merlin")
    n = len(games)
    report = EvalReport(
        fold_accuracies=[],
        mean_accuracy=model_correct / n if n else 0.0,
        pooled_accuracy=model_correct / n if n else 0.0,
        n_games=n,
    )
    report.baseline_human = float(np.mean([_human_correct(g) for g in games])) if n else 0.0
    report.contingency = counts
    report.shot_breakdown = breakdown
    return report


def stub_trainer_always_seat(seat: int):
    """Test helper: a trainer whose scorer always prefers one seat."""
    def trainer(X, y):
        def scorer(x):
            scores = np.zeros(5)
            scores[seat] = 1.0
            return scores
        return scorer
    return trainer
