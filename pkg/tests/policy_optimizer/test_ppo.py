"""
Tests for the PPO update.
"""

import numpy as np
import pytest
import torch

from counterclaim.policy_optimizer import (
    BigramPolicy,
    PolicyError,
    PolicyPrompt,
    PpoConfig,
    generalized_advantages,
    ppo_loss,
    ppo_update,
    prepare_batch,
    rollout,
    shaped_rewards,
    whiten,
)

VOCAB = ["alpha", "beta", "gamma", "delta", "omega"]
PROMPT = PolicyPrompt(claim="garlic cures the virus", evidence=["no study supports this"])


def length_reward(claim, evidence, response):
    return len(response.split()) / 3.0


def bos_logits(policy, bucket=0):
    with torch.no_grad():
        return policy.logits(torch.tensor([policy.bos_state]), torch.tensor([bucket]))[0].numpy().copy()


@pytest.fixture
def pair():
    """Random trainable actor and its frozen copy, five tokens, max_length 3."""
    actor = BigramPolicy(VOCAB, max_length=3, context_buckets=2, init_scale=0.5, seed=3)
    return actor, actor.trainable_copy().freeze()


class TestAdvantages:
    def test_lambda_one_gives_reward_to_go_minus_value(self):
        rewards = np.array([0.1, -0.2, 1.0])
        values = np.array([0.3, 0.2, 0.5])

        advantages, returns = generalized_advantages(rewards, values, gamma=1.0, lam=1.0)

        np.testing.assert_allclose(advantages, [0.9 - 0.3, 0.8 - 0.2, 1.0 - 0.5])
        np.testing.assert_allclose(returns, [0.9, 0.8, 1.0])

    def test_lambda_zero_gives_td_errors(self):
        rewards = np.array([0.1, -0.2, 1.0])
        values = np.array([0.3, 0.2, 0.5])

        advantages, _ = generalized_advantages(rewards, values, gamma=1.0, lam=0.0)

        np.testing.assert_allclose(advantages, [0.1 + 0.2 - 0.3, -0.2 + 0.5 - 0.2, 1.0 - 0.5])

    def test_whiten(self):
        whitened = whiten(np.array([1.0, 2.0, 3.0, 6.0]), 1e-8)

        assert whitened.mean() == pytest.approx(0.0, abs=1e-12)
        assert whitened.std() == pytest.approx(1.0)

    def test_whiten_constant_gives_zeros(self):
        assert np.all(whiten(np.full(5, 0.7), 1e-8) == 0.0)

    def test_shaped_rewards(self, pair):
        actor, _ = pair
        trajectory = rollout(actor, BigramPolicy(VOCAB, 3, 2, 0.5, seed=9).freeze(), [PROMPT], length_reward, count=1)[0]

        shaped = shaped_rewards(trajectory, beta=0.5)

        expected = -0.5 * np.array(trajectory.per_token_kl)
        expected[-1] += trajectory.terminal_reward
        np.testing.assert_allclose(shaped, expected)


class TestPpoUpdate:
    def test_zero_advantages_leave_policy_unchanged(self):
        # Setup
        policy = BigramPolicy(VOCAB, max_length=1, context_buckets=1)
        reference = policy.trainable_copy().freeze()
        trajectories = rollout(policy, reference, [PROMPT], lambda c, e, r: 0.7, count=32)
        bigram, context = policy.bigram.detach().clone(), policy.context.detach().clone()

        # Execute
        _, stats = ppo_update(policy, trajectories, PpoConfig(beta=0.0, epochs=2, batch_size=8))

        # Verify
        assert not stats.aborted
        assert stats.steps > 0
        assert torch.equal(policy.bigram, bigram)
        assert torch.equal(policy.context, context)

    def test_bandit_step_follows_policy_gradient(self):
        # Setup
        rewards = {"low": 0.0, "mid": 0.5, "high": 1.0}
        policy = BigramPolicy(list(rewards), max_length=1, context_buckets=1)
        reference = policy.trainable_copy().freeze()
        trajectories = rollout(policy, reference, [PROMPT], lambda c, e, r: rewards.get(r, 0.0), seed=0, count=400)
        before = bos_logits(policy)

        # Execute
        ppo_update(
            policy,
            trajectories,
            PpoConfig(beta=0.0, epochs=1, batch_size=400, gradient_accumulation=1, learning_rate=0.01),
        )

        # Verify
        pi = np.full(4, 0.25)
        r = np.array([0.0, 0.5, 1.0, 0.0])  # low, mid, high, end-of-sequence
        analytic = pi * (r - np.dot(pi, r))
        np.testing.assert_array_equal(np.sign(bos_logits(policy) - before), np.sign(analytic))

    def test_replay_after_large_step_is_clipped(self, pair):
        actor, reference = pair
        trajectories = rollout(actor, reference, [PROMPT], length_reward, seed=1, count=100)
        with torch.no_grad():
            actor.bigram.add_(3.0 * torch.randn(actor.bigram.shape, generator=torch.Generator().manual_seed(0), dtype=torch.float64))

        _, stats = ppo_update(actor, trajectories, PpoConfig())

        assert stats.clip_fraction > 0.0

    def test_fresh_samples_start_unclipped(self, pair):
        actor, reference = pair
        trajectories = rollout(actor, reference, [PROMPT], length_reward, seed=1, count=64)

        _, stats = ppo_update(actor, trajectories, PpoConfig(batch_size=64, gradient_accumulation=1, epochs=1))

        assert stats.clip_fraction == 0.0

    def test_non_finite_loss_aborts_and_restores(self, pair):
        # Setup
        actor, reference = pair
        trajectories = rollout(actor, reference, [PROMPT], length_reward, seed=1, count=20)
        trajectories[3] = trajectories[3].model_copy(update={"terminal_reward": float("nan")})
        before = {name: tensor.clone() for name, tensor in actor.state_dict().items()}

        # Execute
        _, stats = ppo_update(actor, trajectories, PpoConfig())

        # Verify
        assert stats.aborted
        for name, tensor in actor.state_dict().items():
            assert torch.equal(tensor, before[name])

    def test_distributions_stay_normalized(self, pair):
        actor, reference = pair
        trajectories = rollout(actor, reference, [PROMPT], length_reward, seed=1, count=64)

        ppo_update(actor, trajectories, PpoConfig(epochs=3, learning_rate=0.5))

        for bucket in range(actor.context_buckets):
            sums = np.exp(actor.log_prob_table(bucket)).sum(axis=1)
            assert np.all(np.abs(sums - 1.0) <= 1e-9)

    def test_stats_describe_the_batch(self, pair):
        actor, _ = pair
        trajectories = rollout(actor, BigramPolicy(VOCAB, 3, 2, 0.5, seed=9).freeze(), [PROMPT], length_reward, count=40)

        _, stats = ppo_update(actor, trajectories, PpoConfig(beta=0.3))

        assert stats.mean_reward == pytest.approx(np.mean([t.terminal_reward for t in trajectories]))
        assert stats.mean_kl == pytest.approx(np.mean([sum(t.per_token_kl) for t in trajectories]))
        assert stats.beta == 0.3
        assert stats.trajectories == 40

    def test_gradient_accumulation_step_count(self, pair):
        actor, reference = pair
        trajectories = rollout(actor, reference, [PROMPT], length_reward, count=40)

        _, stats = ppo_update(actor, trajectories, PpoConfig(epochs=2, batch_size=4, gradient_accumulation=4))

        # 10 minibatches per epoch: two full accumulations and one partial
        assert stats.steps == 6

    def test_empty_batch_rejected(self, pair):
        actor, _ = pair

        with pytest.raises(PolicyError):
            ppo_update(actor, [], PpoConfig())

    def test_frozen_actor_rejected(self, pair):
        actor, reference = pair
        trajectories = rollout(actor, reference, [PROMPT], length_reward, count=4)

        with pytest.raises(PolicyError):
            ppo_update(reference, trajectories, PpoConfig())


class TestGradients:
    def test_loss_gradients_match_finite_differences(self):
        # Setup
        actor = BigramPolicy(VOCAB, max_length=3, context_buckets=2, init_scale=0.5, seed=3)
        reference = BigramPolicy(VOCAB, max_length=3, context_buckets=2, init_scale=0.5, seed=4).freeze()
        prompts = [PROMPT, PolicyPrompt(claim="masks cause hypoxia", evidence=["oxygen was unchanged"])]
        trajectories = rollout(actor, reference, prompts, length_reward, seed=0, count=30)
        generator = torch.Generator().manual_seed(5)
        with torch.no_grad():
            for parameter in actor.parameters():
                parameter.add_(0.02 * torch.randn(parameter.shape, generator=generator, dtype=torch.float64))
        batch = prepare_batch(actor, trajectories, beta=0.2)
        parameters = list(actor.parameters())

        def loss():
            return ppo_loss(actor, batch, batch.all_tokens, clip_ratio=0.2, value_coef=1.0).loss

        # Execute
        actor.zero_grad()
        loss().backward()
        analytic = torch.cat([p.grad.flatten() for p in parameters]).numpy()

        step = 1e-6
        numeric = []
        with torch.no_grad():
            for parameter in parameters:
                flat = parameter.view(-1)
                for i in range(flat.numel()):
                    original = float(flat[i])
                    flat[i] = original + step
                    plus = float(loss())
                    flat[i] = original - step
                    minus = float(loss())
                    flat[i] = original
                    numeric.append((plus - minus) / (2 * step))

        # Verify
        numeric = np.array(numeric)
        assert np.linalg.norm(analytic - numeric) / np.linalg.norm(analytic) < 1e-4
