"""Key-value configuration files for linkage features and gate policies.

Format: one `key = value` per line, `#` comments and blank lines ignored.
Keys are grouped by dotted prefixes with a numeric index, e.g.
`feature.0.kind` or `level.2.maxRisk`; indices must start at 0 and be
consecutive.
"""
from __future__ import annotations

from pathlib import Path

from .disclosure.gate import Policy, PolicyLevel
from .disclosure.metrics import ReleasePlan
from .errors import ConfigError
from .linkage.schema import FeatureSpec


def load_kv(path: str | Path) -> dict[str, str]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    out: dict[str, str] = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {line_no}: expected `key = value`, got {line!r}")
        key, value = key.strip(), value.strip()
        if not key:
            raise ConfigError(f"line {line_no}: empty key")
        if key in out:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        out[key] = value
    return out


def _indexed(kv: dict[str, str], prefix: str) -> list[dict[str, str]]:
    """Collect `prefix.<i>.<field>` groups as a dense list of dicts."""
    groups: dict[int, dict[str, str]] = {}
    for key, value in kv.items():
        parts = key.split(".")
        if parts[0] != prefix:
            continue
        if len(parts) != 3 or not parts[1].isdigit():
            raise ConfigError(f"bad key {key!r}: expected {prefix}.<index>.<field>")
        groups.setdefault(int(parts[1]), {})[parts[2]] = value
    if not groups:
        raise ConfigError(f"no {prefix}.* entries found")
    indices = sorted(groups)
    if indices != list(range(len(indices))):
        raise ConfigError(f"{prefix} indices must be consecutive from 0, got {indices}")
    return [groups[i] for i in indices]


def _need(group: dict[str, str], field: str, where: str) -> str:
    if field not in group:
        raise ConfigError(f"{where}: missing field {field!r}")
    return group[field]


def _fnum(value: str, where: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{where}: expected a number, got {value!r}")


def parse_features(kv: dict[str, str]):
    """-> (specs, mu, lam, block_field or None)."""
    specs = []
    for i, grp in enumerate(_indexed(kv, "feature")):
        where = f"feature.{i}"
        kind = _need(grp, "kind", where)
        source = _need(grp, "field", where)
        name = grp.get("name", source)
        n_chars = int(grp["nChars"]) if "nChars" in grp else 0
        bins: tuple[float, ...] = ()
        if "bins" in grp:
            bins = tuple(_fnum(b, where) for b in grp["bins"].split(","))
        try:
            specs.append(
                FeatureSpec(
                    name=name, source_field=source, kind=kind, n_chars=n_chars, bins=bins
                )
            )
        except Exception as exc:
            raise ConfigError(f"{where}: {exc}")
    mu = _fnum(kv.get("mu", "0.01"), "mu")
    lam = _fnum(kv.get("lambda", "0.01"), "lambda")
    block_field = kv.get("block") or None
    return tuple(specs), mu, lam, block_field


def _plan_from_group(grp: dict[str, str], where: str) -> ReleasePlan:
    method = _need(grp, "method", where)
    try:
        if method == "identity":
            return ReleasePlan.identity()
        if method == "microaggregate":
            return ReleasePlan.microaggregation(
                k=int(_need(grp, "k", where)), stat=grp.get("stat", "mean")
            )
        if method == "noise":
            return ReleasePlan.noise(
                lam=_fnum(_need(grp, "lambda", where), where),
                seed=int(grp.get("seed", "0")),
            )
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"{where}: {exc}")
    raise ConfigError(f"{where}: unknown method {method!r}")


def parse_policy(kv: dict[str, str]) -> Policy:
    levels = []
    for i, grp in enumerate(_indexed(kv, "level")):
        where = f"level.{i}"
        levels.append(
            PolicyLevel(
                level=i,
                max_risk=_fnum(_need(grp, "maxRisk", where), where),
                plan=_plan_from_group(grp, where),
            )
        )
    try:
        return Policy(levels=tuple(levels))
    except ValueError as exc:
        raise ConfigError(str(exc))


def load_features(path: str | Path):
    return parse_features(load_kv(path))


def load_policy(path: str | Path) -> Policy:
    return parse_policy(load_kv(path))
