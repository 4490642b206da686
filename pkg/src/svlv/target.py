"""Target configuration: the machine facts every proof depends on."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

KEYS = ("int_width", "denorm", "float_format", "max_enum_domain")
WIDTHS = (8, 16, 32, 64)


class TargetConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TargetConfig:
    int_width: int = 32
    denorm: bool | None = True
    float_format: str = "binary32"
    max_enum_domain: int = 65536
    # keys that were written in the file; defaults fill the rest
    explicit: frozenset = frozenset(KEYS)
    # where the config came from, for diagnostics only
    origin: str = field(default="<default>", compare=False)
    key_lines: tuple = field(default=(), compare=False)  # ((key, line), ...)

    def __post_init__(self) -> None:
        if self.int_width not in WIDTHS:
            raise TargetConfigError(f"unsupported width {self.int_width}")
        if self.float_format != "binary32":
            raise TargetConfigError(f"unsupported float format {self.float_format!r}")
        if self.max_enum_domain <= 0:
            raise TargetConfigError("max_enum_domain must be positive")

    @property
    def int_first(self) -> int:
        return -(2 ** (self.int_width - 1))

    @property
    def int_last(self) -> int:
        return 2 ** (self.int_width - 1) - 1

    @property
    def supports_denorm(self) -> bool:
        # an unspecified capability is treated as the IEEE-754 default
        return True if self.denorm is None else self.denorm

    def line_of(self, key: str) -> int:
        """Line declaring ``key`` in the source file, or 1 when it was defaulted."""
        return dict(self.key_lines).get(key, 1)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in KEYS}

    def render(self) -> str:
        def fmt(v):
            return str(v).lower() if isinstance(v, bool) else str(v)
        return "".join(f"{k} = {fmt(getattr(self, k))}\n" for k in KEYS if getattr(self, k) is not None)


def _parse_bool(key: str, raw: str) -> bool:
    v = raw.strip().lower()
    if v in ("true", "yes", "1"):
        return True
    if v in ("false", "no", "0"):
        return False
    raise TargetConfigError(f"{key}: malformed boolean {raw!r}")


def parse_target(text: str, strict: bool = False, origin: str = "<target>") -> TargetConfig:
    values: dict = {}
    lines: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise TargetConfigError(f"{origin}:{lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in KEYS:
            raise TargetConfigError(f"{origin}:{lineno}: unknown key {key!r}")
        if key in values:
            raise TargetConfigError(f"{origin}:{lineno}: duplicate key {key!r}")
        lines[key] = lineno
        try:
            if key in ("int_width", "max_enum_domain"):
                values[key] = int(raw)
            elif key == "denorm":
                values[key] = _parse_bool(key, raw)
            else:
                values[key] = raw.strip()
        except ValueError as exc:
            if isinstance(exc, TargetConfigError):
                raise
            raise TargetConfigError(f"{origin}:{lineno}: malformed value for {key}: {raw!r}") from None
    missing = [k for k in KEYS if k not in values]
    if strict and missing:
        raise TargetConfigError(f"{origin}: missing key(s) {', '.join(missing)}")
    if "denorm" not in values:
        values["denorm"] = None
    return TargetConfig(**values, explicit=frozenset(k for k in KEYS if k in values and values[k] is not None),
                        origin=origin, key_lines=tuple(sorted(lines.items())))


def load_target(path: str | Path, strict: bool = False) -> TargetConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise TargetConfigError(f"cannot read target config {p}: {exc.strerror}") from None
    return parse_target(text, strict=strict, origin=str(p))


DEFAULT_TARGET = TargetConfig()
