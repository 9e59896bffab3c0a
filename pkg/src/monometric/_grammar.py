"""Parser for ``name[:param=value[,param=value]]`` spec strings."""

from .exceptions import ValidationError


def parse_spec(text: str) -> tuple[str, dict[str, float]]:
    """Split ``"wyd:p=0.5"`` into ``("wyd", {"p": 0.5})``.

    ``table:<path>`` is returned as ``("table", {"path": <path>})``.
    """
    text = text.strip()
    if not text:
        raise ValidationError("empty function spec")
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    if name == "table":
        if not rest:
            raise ValidationError("table spec needs a path: table:<file>")
        return name, {"path": rest}
    params: dict[str, float] = {}
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ValidationError(f"malformed parameter {item!r} in {text!r}")
            key = key.strip()
            if key in params:
                raise ValidationError(f"parameter {key!r} given twice in {text!r}")
            try:
                params[key] = float(value)
            except ValueError:
                raise ValidationError(f"parameter {key!r} is not a number in {text!r}") from None
    return name, params


def format_param(value: float) -> str:
    return f"{value:g}"
