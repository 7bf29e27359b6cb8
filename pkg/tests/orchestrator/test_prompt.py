"""
Tests for prompt rendering against the committed golden files.
"""

from pathlib import Path

import pytest
from pydantic import ValidationError

from counterclaim.orchestrator import InvalidRequestError, PromptTemplate, prompt_renderer, render_prompt

GOLDEN = Path(__file__).parent / "golden"


def golden(name):
    return (GOLDEN / name).read_bytes().decode("utf-8")


class TestRenderPrompt:
    def test_single_evidence_matches_golden_file(self):
        assert render_prompt(None, "C", ["E1"]) == golden("prompt_single_evidence.txt")

    def test_evidence_joined_by_newline_in_rank_order(self):
        # Setup
        evidence = [
            "Masks do not lower blood oxygen in healthy adults.",
            "Pulse oximetry was unchanged after an hour of mask wear.",
        ]

        # Execute
        prompt = render_prompt(None, "Wearing a mask causes oxygen deprivation.", evidence)

        # Verify
        assert prompt == golden("prompt_two_evidence.txt")
        assert prompt.index(evidence[0]) < prompt.index(evidence[1])

    def test_rendering_is_deterministic(self):
        first = render_prompt(PromptTemplate(), "claim", ["a", "b"]).encode("utf-8")
        second = render_prompt(PromptTemplate(), "claim", ["a", "b"]).encode("utf-8")

        assert first == second

    def test_response_slot_left_empty(self):
        assert render_prompt(None, "claim", ["evidence"]).endswith("### Response\n")

    def test_braces_in_inputs_are_kept_verbatim(self):
        prompt = render_prompt(None, "a {claim} here", ["{evidence} text"])

        assert "{evidence} text; Based on" in prompt
        assert prompt.count("a {claim} here") == 1

    def test_empty_evidence_rejected(self):
        with pytest.raises(InvalidRequestError):
            render_prompt(None, "claim", [])

    def test_renderer_uses_the_template(self):
        template = PromptTemplate(body="Claim: {claim}\nEvidence: {evidence}")

        render = prompt_renderer(template)

        assert render("c", ["e"]) == "### Instruction\nClaim: c\nEvidence: e\n### Response\n"


class TestPromptTemplate:
    @pytest.mark.parametrize(
        "body",
        ["{evidence} only", "{claim} only", "{evidence} {claim} {claim}", "{evidence} {claim} {extra}"],
    )
    def test_body_needs_each_slot_once(self, body):
        with pytest.raises(ValidationError):
            PromptTemplate(body=body)
