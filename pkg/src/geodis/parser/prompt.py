"""One-shot prompt for turning a Location string into admin-level JSON."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

COUNTRY_SLOT = "<<COUNTRY>>"
LOCATION_SLOT = "<<LOCATION>>"


@dataclass(frozen=True)
class PromptTemplate:
    system_text: str
    example_input: str
    example_country: str
    example_output: dict
    user_text: str
    version: str

    @property
    def example_output_text(self) -> str:
        return json.dumps(self.example_output, ensure_ascii=False)

    @classmethod
    def from_dict(cls, d: dict) -> PromptTemplate:
        user_text = d["user_text"]
        for slot in (COUNTRY_SLOT, LOCATION_SLOT):
            if slot not in user_text:
                raise ValueError(f"prompt template lacks the {slot} placeholder")
        return cls(d["system_text"], d["example_input"], d["example_country"],
                   d["example_output"], user_text, str(d["version"]))


def load_template(path: str | Path | None = None) -> PromptTemplate:
    """Load a template file, or the packaged default when ``path`` is None."""
    if path is None:
        text = resources.files("geodis").joinpath("data/prompt_v1.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return PromptTemplate.from_dict(json.loads(text))


DEFAULT_TEMPLATE = load_template()


def build_prompt(template: PromptTemplate, location: str, country: str) -> str:
    if not location or not location.strip():
        raise ValueError("location must be non-empty")
    user = template.user_text.replace(COUNTRY_SLOT, country).replace(LOCATION_SLOT, location)
    return (
        f"{template.system_text}\n\n"
        f"Example\nCountry: {template.example_country}\n"
        f"Location: {template.example_input}\n"
        f"JSON: {template.example_output_text}\n\n"
        f"{user}"
    )
