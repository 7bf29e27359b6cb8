"""
Prompt rendering.

The evidence comes first, one document per line in retrieval order, followed
by the instruction and the claim. Inference leaves everything after the
response header empty.
"""

from typing import Optional, Sequence

from .errors.orchestrator_errors import InvalidRequestError
from .models.orchestrator_models import PromptTemplate

DEFAULT_TEMPLATE = PromptTemplate()


def render_prompt(template: Optional[PromptTemplate], claim: str, evidence: Sequence[str]) -> str:
    """
    Fill the template with a claim and its evidence texts.

    Args:
        template: Template to fill; None uses DEFAULT_TEMPLATE
        claim: The claim to address
        evidence: Evidence texts, best first

    Returns:
        str: The prompt, ending with the response header and a newline

    Raises:
        InvalidRequestError: If evidence is empty

    Example:
        >>> render_prompt(None, "C", ["E1"])
        '### Instruction\\nE1; Based on the above evidence, determine if the claim is valid and explain why: C\\n### Response\\n'
    """
    if not evidence:
        raise InvalidRequestError("Cannot render a prompt without evidence")
    template = template or DEFAULT_TEMPLATE
    body = template.body.format(evidence="\n".join(evidence), claim=claim)
    return f"{template.instruction_header}\n{body}\n{template.response_header}\n"


def prompt_renderer(template: Optional[PromptTemplate] = None):
    """A (claim, evidence) -> prompt callable, for training the policy on the serving prompt."""

    def render(claim: str, evidence: Sequence[str]) -> str:
        return render_prompt(template, claim, evidence)

    return render
