"""
Experiment configuration for ``marginlab``.

One YAML document per run: the command, the master seed, the trial count and a
section per command. Schema errors are reported at the line and column of the
offending node.
"""

import hashlib
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import yaml
from pydantic import AfterValidator, BaseModel, ConfigDict, Field, ValidationError

from application.ports.configuration_port import ConfigurationParseError
from application.services.learn import DEFAULT_QUANTILES, planted_margin_distribution
from domain.value_objects.bound_inputs import BoundKind
from domain.value_objects.labeled_data import DiscreteDistribution
from domain.value_objects.unit_vector import UnitVector
from infrastructure.adapters.yaml_configuration_adapter import YamlConfigurationAdapter

COMMANDS = ("bounds", "verify", "lowerbound", "gap")
MAX_SEED = 2**64


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _check_bound_names(value: Dict[str, float]) -> Dict[str, float]:
    known = {kind.value for kind in BoundKind}
    unknown = sorted(set(value) - known)
    if unknown:
        raise ValueError(f"unknown bound(s) {unknown}; expected any of {sorted(known)}")
    return value


BoundConstants = Annotated[Dict[str, float], AfterValidator(_check_bound_names)]

class DistributionSpec(_Section):
    kind: Literal["planted"] = "planted"
    d: int = Field(20, ge=2)
    support_size: int = Field(200, ge=1)
    margin: float = Field(0.2, gt=0.0, lt=1.0)
    noise_rate: float = Field(0.0, ge=0.0, lt=0.5)
    seed: int = Field(0, ge=0, lt=MAX_SEED)

    def build(self) -> Tuple[DiscreteDistribution, UnitVector]:
        return planted_margin_distribution(
            self.d, self.support_size, self.margin, self.noise_rate, self.seed
        )


class BoundsSweepConfig(_Section):
    gammas: List[float] = Field(default_factory=lambda: [0.1])
    ns: List[float] = Field(default_factory=lambda: [100.0])
    deltas: List[float] = Field(default_factory=lambda: [0.1])
    losses: List[float] = Field(default_factory=lambda: [0.0])
    c: float = Field(1.0, gt=0.0)
    constants: BoundConstants = Field(default_factory=dict)
    rademacher: bool = False
    tau: Optional[float] = None
    range_constant: float = Field(1.0, gt=0.0)

    def bound_constants(self) -> Dict[BoundKind, float]:
        return {BoundKind(name): c for name, c in self.constants.items()}


class VerifyConfig(_Section):
    checks: List[str] = Field(default_factory=lambda: ["p-in-unit"])
    params: Dict[str, Dict[str, Any]] = Field(default_factory=dict)
    distribution: DistributionSpec = Field(default_factory=DistributionSpec)


class LowerBoundRunConfig(_Section):
    taus: List[float] = Field(default_factory=lambda: [0.5])
    level: int = Field(1, ge=1)
    n: int = Field(2, ge=1)
    strict: bool = False


class GapRunConfig(_Section):
    distribution: DistributionSpec = Field(default_factory=DistributionSpec)
    n: int = Field(500, ge=1)
    gamma: float = Field(0.2, gt=0.0, le=1.0)
    delta: float = Field(0.1, gt=0.0, le=1.0)
    max_epochs: int = Field(100, ge=1)
    constants: BoundConstants = Field(default_factory=dict)
    quantiles: List[float] = Field(default_factory=lambda: list(DEFAULT_QUANTILES))
    per_trial: bool = False

    def bound_constants(self) -> Dict[BoundKind, float]:
        return {BoundKind(name): c for name, c in self.constants.items()}


class ExperimentConfig(_Section):
    """One invocation: the command, its master seed and trial count, and a section per command."""

    command: Optional[Literal["bounds", "verify", "lowerbound", "gap"]] = None
    seed: int = Field(0, ge=0, lt=MAX_SEED)
    trials: Optional[int] = Field(None, ge=0)
    out: Optional[str] = None
    threads: Optional[int] = Field(None, ge=1)
    bounds: BoundsSweepConfig = Field(default_factory=BoundsSweepConfig)
    verify: VerifyConfig = Field(default_factory=VerifyConfig)
    lowerbound: LowerBoundRunConfig = Field(default_factory=LowerBoundRunConfig)
    gap: GapRunConfig = Field(default_factory=GapRunConfig)


def _node_position(
    root: Optional[yaml.Node], loc: Sequence[Union[str, int]]
) -> Tuple[Optional[int], Optional[int]]:
    """1-based line and column of the YAML node at pydantic location ``loc``."""
    if root is None:
        return None, None
    node = root
    for key in loc:
        if isinstance(node, yaml.MappingNode):
            match = next((v for k, v in node.value if getattr(k, "value", None) == str(key)), None)
            if match is None:
                break
            node = match
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
        else:
            break
    return node.start_mark.line + 1, node.start_mark.column + 1


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Raises:
        ConfigurationParseError: On malformed YAML or schema violations, with
            the position of the offending node
    """
    path = Path(path)
    document = YamlConfigurationAdapter().load(path)
    try:
        return ExperimentConfig.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        loc = first.get("loc", ())
        line, column = _node_position(yaml.compose(path.read_text(encoding="utf-8")), loc)
        where = ".".join(str(part) for part in loc) or "<root>"
        raise ConfigurationParseError(f"{where}: {first['msg']}", path, line, column) from e


def dump_config(config: ExperimentConfig, path: Union[str, Path]) -> None:
    YamlConfigurationAdapter().dump(config.model_dump(mode="json"), Path(path))


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical JSON form; ``threads`` never affects output and is excluded."""
    text = YamlConfigurationAdapter().canonical_text(
        config.model_dump(mode="json", exclude={"threads"})
    )
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
