import pytest
import torch

from app.controllers.network.model import MultiHeadModel, build_model, derive_seed
from app.exceptions import InvalidDataError, ShapeMismatchError
from app.models.network import LayerSpec, ModelSpec, desk_scale_spec


def _spec(head_dims: list[int] | None = None) -> ModelSpec:
    return ModelSpec(input_dim=4, trunk_layers=[LayerSpec(width=8), LayerSpec(width=6)], head_dims=head_dims or [3])


class TestDeriveSeed:
    def test_is_stable(self) -> None:
        assert derive_seed(7, "trunk") == derive_seed(7, "trunk")

    def test_labels_change_the_seed(self) -> None:
        assert derive_seed(7, 1, "step2") != derive_seed(7, 1, "step3")
        assert derive_seed(7, 1, "step2") != derive_seed(7, 2, "step2")

    def test_fits_in_63_bits(self) -> None:
        assert 0 <= derive_seed(123, "anything") < 2**63


class TestMultiHeadModel:
    def test_forward_returns_one_logit_block_per_head(self) -> None:
        model = build_model(_spec([3, 2]), seed=0)
        logits = model(torch.zeros(5, 4, dtype=torch.float64))
        assert [tuple(block.shape) for block in logits] == [(5, 3), (5, 2)]

    def test_forward_selected_heads(self) -> None:
        model = build_model(_spec([3, 2]), seed=0)
        (logits,) = model(torch.zeros(5, 4, dtype=torch.float64), heads=[1])
        assert logits.shape == (5, 2)

    def test_same_seed_same_parameters(self) -> None:
        first = build_model(_spec(), seed=11)
        second = build_model(_spec(), seed=11)
        for left, right in zip(first.parameters(), second.parameters()):
            assert torch.equal(left, right)

    def test_different_seed_different_parameters(self) -> None:
        first = build_model(_spec(), seed=11)
        second = build_model(_spec(), seed=12)
        assert not torch.equal(next(first.parameters()), next(second.parameters()))

    def test_biases_start_at_zero(self) -> None:
        model = build_model(_spec(), seed=3)
        for name, param in model.named_parameters():
            if name.endswith("bias"):
                assert torch.count_nonzero(param) == 0

    def test_he_initialisation_scale(self) -> None:
        spec = ModelSpec(input_dim=400, trunk_layers=[LayerSpec(width=400)], head_dims=[2])
        weight = build_model(spec, seed=5).trunk[0].weight
        assert float(weight.std()) == pytest.approx((2.0 / 400) ** 0.5, rel=0.02)

    def test_add_head_extends_spec_and_offsets(self) -> None:
        model = build_model(_spec([3]), seed=0)
        head_id = model.add_head(2, seed=99)
        assert head_id == 1
        assert model.spec.head_dims == [3, 2]
        assert model.head_offsets() == [0, 3]
        assert len(model.blocks()) == 3

    def test_add_head_rejects_empty_head(self) -> None:
        with pytest.raises(InvalidDataError):
            build_model(_spec(), seed=0).add_head(0, seed=1)

    def test_input_width_checked(self) -> None:
        with pytest.raises(ShapeMismatchError):
            build_model(_spec(), seed=0).features(torch.zeros(2, 5, dtype=torch.float64))

    def test_unknown_head_rejected(self) -> None:
        model = build_model(_spec(), seed=0)
        with pytest.raises(InvalidDataError):
            model(torch.zeros(1, 4, dtype=torch.float64), heads=[4])

    def test_set_trainable_mask(self) -> None:
        model = build_model(_spec([3, 2]), seed=0)
        model.set_trainable([False, True, False])
        assert model.trainable_mask == [False, True, False]
        assert sum(param.numel() for param in model.trainable_parameters()) == 6 * 3 + 3

    def test_set_trainable_length_checked(self) -> None:
        with pytest.raises(ShapeMismatchError):
            build_model(_spec(), seed=0).set_trainable([True])

    def test_reinitialize_block_changes_only_that_block(self) -> None:
        model = build_model(_spec([3]), seed=0)
        head_before = [param.clone() for param in model.heads[0].parameters()]
        trunk_before = model.trunk[0].weight.clone()
        model.reinitialize_block(0, seed=1234)
        assert not torch.equal(model.trunk[0].weight, trunk_before)
        for param, before in zip(model.heads[0].parameters(), head_before):
            assert torch.equal(param, before)

    def test_parameter_count(self) -> None:
        model = build_model(_spec([3, 2]), seed=0)
        assert model.parameter_count() == (4 * 8 + 8) + (8 * 6 + 6) + (6 * 3 + 3) + (6 * 2 + 2)

    def test_desk_scale_spec(self) -> None:
        model = MultiHeadModel(desk_scale_spec(784, [2]), seed=0)
        assert model.feature_dim == 400
        assert model.parameter_count() == (784 * 400 + 400) + (400 * 400 + 400) + (400 * 2 + 2)
