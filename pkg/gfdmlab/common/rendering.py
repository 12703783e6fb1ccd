from typing import Any

from jinja2 import Environment, PackageLoader, StrictUndefined

templates = Environment(
    loader=PackageLoader("gfdmlab", "templates"),
    undefined=StrictUndefined,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def _number(value: float | None, fmt: str = ".3e") -> str:
    return "-" if value is None else format(value, fmt)


templates.filters["number"] = _number


def render(name: str, **context: Any) -> str:
    return templates.get_template(name).render(**context)
