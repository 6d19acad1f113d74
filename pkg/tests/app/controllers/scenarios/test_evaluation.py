import pytest
import torch

from app.controllers.baselines import FinetuneController
from app.controllers.network.model import MultiHeadModel, build_model
from app.controllers.scenarios.evaluation import Evaluator
from app.exceptions import InvalidDataError
from app.models.stream import ScenarioMode
from tests.app.toy_streams import ORTHOGONAL_TASKS, fast_optimizer, hyperparams, make_stream, wide_spec


def _zeroed_model(head_dims: list[int]) -> MultiHeadModel:
    model = build_model(wide_spec().model_copy(update={"head_dims": head_dims}), seed=0)
    with torch.no_grad():
        for head in model.heads:
            head.weight.zero_()
            head.bias.zero_()
    return model


class TestEvaluator:
    def test_trained_single_task(self) -> None:
        stream = make_stream(ORTHOGONAL_TASKS)
        learner = FinetuneController(hyperparams(), fast_optimizer(), seed=0)
        state = learner.train_first_task(wide_spec().with_head(2), stream.tasks[0])
        (accuracy,) = Evaluator().evaluate(state.model, stream, ScenarioMode.TASK_IL)
        assert accuracy >= 0.95

    def test_uninformative_head_scores_class_prior(self) -> None:
        stream = make_stream(ORTHOGONAL_TASKS)
        assert Evaluator().task_accuracy(_zeroed_model([2, 2]), stream, 0, ScenarioMode.TASK_IL) == 0.5

    def test_class_il_uses_global_offsets(self) -> None:
        stream = make_stream(ORTHOGONAL_TASKS)
        model = _zeroed_model([2, 2])
        with torch.no_grad():
            model.heads[1].bias.fill_(10.0)
        evaluator = Evaluator()
        assert evaluator.task_accuracy(model, stream, 0, ScenarioMode.TASK_IL) == 0.5
        assert evaluator.task_accuracy(model, stream, 0, ScenarioMode.CLASS_IL) == 0.0
        assert evaluator.task_accuracy(model, stream, 1, ScenarioMode.CLASS_IL) == 0.5

    def test_class_il_never_beats_task_il(self) -> None:
        stream = make_stream(ORTHOGONAL_TASKS)
        model = build_model(wide_spec().model_copy(update={"head_dims": [2, 2]}), seed=3)
        evaluator = Evaluator()
        task_il = evaluator.evaluate(model, stream, ScenarioMode.TASK_IL)
        class_il = evaluator.evaluate(model, stream, ScenarioMode.CLASS_IL)
        assert all(c <= t for c, t in zip(class_il, task_il))

    def test_preview_leaves_model_alone(self) -> None:
        stream = make_stream(ORTHOGONAL_TASKS)
        model = build_model(wide_spec().with_head(2), seed=0)
        accuracy = Evaluator().preview_next_task(model, stream, ScenarioMode.TASK_IL, head_seed=11)
        assert 0.0 <= accuracy <= 1.0
        assert model.head_count == 1
        again = Evaluator().preview_next_task(model, stream, ScenarioMode.TASK_IL, head_seed=11)
        assert accuracy == again

    def test_preview_needs_a_next_task(self) -> None:
        stream = make_stream(ORTHOGONAL_TASKS)
        model = _zeroed_model([2, 2])
        with pytest.raises(InvalidDataError):
            Evaluator().preview_next_task(model, stream, ScenarioMode.TASK_IL, head_seed=0)

    def test_headless_model(self) -> None:
        with pytest.raises(InvalidDataError):
            Evaluator().evaluate(build_model(wide_spec(), seed=0), make_stream(ORTHOGONAL_TASKS), ScenarioMode.TASK_IL)
