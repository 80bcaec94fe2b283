"""Location-string parsing: LLM provider route and rule-based fallback."""
from geodis.parser.fallback import parse_fallback
from geodis.parser.prompt import DEFAULT_TEMPLATE, PromptTemplate, build_prompt, load_template
from geodis.parser.provider import (
    ChatCompletionsProvider,
    MalformedOutput,
    Provider,
    ProviderError,
    ProviderExhausted,
    extract_tree,
    parse_with_provider,
)
from geodis.parser.tree import (
    AdminEntry,
    EmptyParse,
    LocationTree,
    ParseError,
    SchemaViolation,
    validate_tree,
)

__all__ = [
    "AdminEntry", "ChatCompletionsProvider", "DEFAULT_TEMPLATE", "EmptyParse",
    "LocationTree", "MalformedOutput", "ParseError", "PromptTemplate", "Provider",
    "ProviderError", "ProviderExhausted", "SchemaViolation", "build_prompt",
    "extract_tree", "load_template", "parse_fallback", "parse_with_provider",
    "validate_tree",
]
