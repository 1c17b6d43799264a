"""Key files and experiment grid configs.

Both are UTF-8 ``name=value`` lines with ``#`` comments; grid configs add
``[section]`` headers. Values are validated by the domain models, so an
unknown name or an out-of-range value is rejected with the line it came from.
"""

from pathlib import Path
from typing import Any, Final, Optional, Union

from pydantic import ValidationError

from src.core.enums import AttackKind, CollisionPolicy, EmbedMode
from src.core.models import (
    AttackSpec,
    BitPlaneLayout,
    EmbedConfig,
    ExperimentGrid,
    SecretKey,
)
from src.infrastructure.files.exceptions import KeyFileError
from src.infrastructure.logging.logger import setup_logger

logger = setup_logger(__name__)

PathLike = Union[str, Path]

KEY_FIELDS: Final = ("mu", "u0", "burn_in", "mix_iters", "authenticated")
AUTO: Final[str] = "auto"
BUILTIN_PREFIX: Final[str] = "builtin:"
EXPERIMENT_SECTION: Final[str] = "experiment"
KEY_SECTION: Final[str] = "key"
ATTACK_PREFIX: Final[str] = "attack."
EXPERIMENT_FIELDS: Final = frozenset(
    {
        "carrier",
        "watermark",
        "modes",
        "trials",
        "seed",
        "mode",
        "collision_policy",
        "msc_mask",
        "lsc_mask",
        "key_file",
    }
)
ATTACK_FIELDS: Final = frozenset({"parameters", "anchor", "interpolation"})
MODE_NAMES: Final = {"unauthenticated": False, "authenticated": True}

Sections = dict[str, dict[str, str]]


def _split_line(line: str, lineno: int) -> Optional[tuple[str, str]]:
    stripped = line.split("#", 1)[0].strip()
    if not stripped:
        return None
    name, sep, value = stripped.partition("=")
    if not sep or not name.strip():
        raise KeyFileError(f"line {lineno}: expected name=value, got {stripped!r}")
    return name.strip(), value.strip()


def parse_key_values(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        pair = _split_line(line, lineno)
        if pair is None:
            continue
        name, value = pair
        if name in values:
            raise KeyFileError(f"line {lineno}: duplicate entry {name!r}")
        values[name] = value
    return values


def parse_sections(text: str) -> Sections:
    sections: Sections = {}
    current: Optional[dict[str, str]] = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            title = stripped[1:-1].strip()
            if not title or title in sections:
                raise KeyFileError(f"line {lineno}: bad or repeated section {title!r}")
            current = sections[title] = {}
            continue
        pair = _split_line(line, lineno)
        if pair is None:
            continue
        if current is None:
            raise KeyFileError(f"line {lineno}: entry outside of any section")
        name, value = pair
        if name in current:
            raise KeyFileError(f"line {lineno}: duplicate entry {name!r}")
        current[name] = value
    return sections


def _parse_bool(name: str, value: str) -> bool:
    lowered = value.lower()
    if lowered not in ("true", "false"):
        raise KeyFileError(f"{name} must be true or false, got {value!r}")
    return lowered == "true"


def key_from_values(values: dict[str, str]) -> SecretKey:
    unknown = sorted(set(values) - set(KEY_FIELDS))
    if unknown:
        raise KeyFileError(f"unknown key entries: {', '.join(unknown)}")
    fields: dict[str, Any] = {
        name: value for name, value in values.items() if name != "authenticated"
    }
    if fields.get("mix_iters", "").lower() == AUTO:
        del fields["mix_iters"]
    if "authenticated" in values:
        fields["authenticated"] = _parse_bool("authenticated", values["authenticated"])
    try:
        return SecretKey(**fields)
    except ValidationError as e:
        raise KeyFileError(f"invalid key: {e}") from e


def parse_key(text: str) -> SecretKey:
    return key_from_values(parse_key_values(text))


def dump_key(key: SecretKey) -> str:
    mix_iters = AUTO if key.mix_iters is None else str(key.mix_iters)
    return (
        f"mu={key.mu!r}\n"
        f"u0={key.u0!r}\n"
        f"burn_in={key.burn_in}\n"
        f"mix_iters={mix_iters}\n"
        f"authenticated={'true' if key.authenticated else 'false'}\n"
    )


def load_key(path: PathLike) -> SecretKey:
    key = parse_key(Path(path).read_text(encoding="utf-8"))
    logger.debug(f"Loaded key from {path}: mu={key.mu}, burn_in={key.burn_in}")
    return key


def save_key(key: SecretKey, path: PathLike) -> None:
    Path(path).write_text(dump_key(key), encoding="utf-8")
    logger.info(f"Key written to {path}")


def resolve_reference(value: str, base: Path) -> str:
    """Keep ``builtin:`` references, anchor relative paths at ``base``."""
    if value.startswith(BUILTIN_PREFIX):
        return value
    path = Path(value)
    return str(path if path.is_absolute() else base / path)


def _check_fields(
    section: str, values: dict[str, str], allowed: frozenset[str]
) -> None:
    unknown = sorted(set(values) - allowed)
    if unknown:
        raise KeyFileError(f"[{section}] unknown entries: {', '.join(unknown)}")


def _parse_list(section: str, name: str, value: str) -> list[str]:
    items = [item.strip() for item in value.split(",") if item.strip()]
    if not items:
        raise KeyFileError(f"[{section}] {name} must list at least one value")
    return items


def _parse_number(section: str, name: str, value: str) -> float:
    try:
        return float(value)
    except ValueError as e:
        raise KeyFileError(f"[{section}] {name}: {value!r} is not a number") from e


def _parse_int(section: str, name: str, value: str) -> int:
    try:
        return int(value, 0)
    except ValueError as e:
        raise KeyFileError(f"[{section}] {name}: {value!r} is not an integer") from e


def _attacks(sections: Sections, seed: int) -> list[AttackSpec]:
    attacks: list[AttackSpec] = []
    for title, values in sections.items():
        if not title.startswith(ATTACK_PREFIX):
            continue
        _check_fields(title, values, ATTACK_FIELDS)
        kind_name = title[len(ATTACK_PREFIX) :]
        try:
            kind = AttackKind(kind_name)
        except ValueError as e:
            raise KeyFileError(f"[{title}] unknown attack {kind_name!r}") from e
        options = {
            name: values[name]
            for name in ("anchor", "interpolation")
            if name in values
        }
        parameters = _parse_list(title, "parameters", values.get("parameters", ""))
        for raw in parameters:
            attacks.append(
                AttackSpec(
                    kind=kind,
                    parameter=_parse_number(title, "parameters", raw),
                    seed=seed,
                    **options,
                )
            )
    return attacks


def grid_from_sections(sections: Sections, base: Path) -> ExperimentGrid:
    unknown = sorted(
        title
        for title in sections
        if title not in (EXPERIMENT_SECTION, KEY_SECTION)
        and not title.startswith(ATTACK_PREFIX)
    )
    if unknown:
        raise KeyFileError(f"unknown sections: {', '.join(unknown)}")
    if EXPERIMENT_SECTION not in sections:
        raise KeyFileError(f"missing [{EXPERIMENT_SECTION}] section")
    experiment = sections[EXPERIMENT_SECTION]
    _check_fields(EXPERIMENT_SECTION, experiment, EXPERIMENT_FIELDS)

    if KEY_SECTION in sections and "key_file" in experiment:
        raise KeyFileError("give either a [key] section or key_file, not both")
    if KEY_SECTION in sections:
        key = key_from_values(sections[KEY_SECTION])
    elif "key_file" in experiment:
        key = load_key(resolve_reference(experiment["key_file"], base))
    else:
        raise KeyFileError("grid needs a [key] section or a key_file entry")

    seed = _parse_int(EXPERIMENT_SECTION, "seed", experiment.get("seed", "0"))
    modes: list[bool] = []
    for name in _parse_list(
        EXPERIMENT_SECTION,
        "modes",
        experiment.get("modes", "unauthenticated,authenticated"),
    ):
        if name.lower() not in MODE_NAMES:
            raise KeyFileError(
                f"[{EXPERIMENT_SECTION}] unknown mode {name!r}, "
                "expected unauthenticated or authenticated"
            )
        modes.append(MODE_NAMES[name.lower()])

    try:
        layout = BitPlaneLayout(
            msc_mask=_parse_int(
                EXPERIMENT_SECTION, "msc_mask", experiment.get("msc_mask", "0xF0")
            ),
            lsc_mask=_parse_int(
                EXPERIMENT_SECTION, "lsc_mask", experiment.get("lsc_mask", "0x0E")
            ),
        )
        config = EmbedConfig(
            mode=EmbedMode(experiment.get("mode", EmbedMode.SUBSTITUTE.value)),
            layout=layout,
            collision_policy=CollisionPolicy(
                experiment.get("collision_policy", CollisionPolicy.PROBE.value)
            ),
        )
        return ExperimentGrid(
            attacks=_attacks(sections, seed),
            modes=modes,
            key=key,
            carrier=resolve_reference(
                experiment.get("carrier", "builtin:carrier"), base
            ),
            watermark=resolve_reference(
                experiment.get("watermark", "builtin:logo"), base
            ),
            trials=_parse_int(
                EXPERIMENT_SECTION, "trials", experiment.get("trials", "1")
            ),
            embed_config=config,
        )
    except (ValidationError, ValueError) as e:
        raise KeyFileError(f"invalid grid: {e}") from e


def load_grid(path: PathLike) -> ExperimentGrid:
    config_path = Path(path)
    sections = parse_sections(config_path.read_text(encoding="utf-8"))
    grid = grid_from_sections(sections, config_path.parent)
    logger.info(
        f"Loaded grid from {path}: {len(grid.attacks)} attack settings, "
        f"{len(grid.modes)} modes, {grid.trials} trials"
    )
    return grid
