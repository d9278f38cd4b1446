"""Built-in models and the registry the scenario language selects from."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from ..errors import ConfigurationError
from ..kernel import TransitionSystem
from . import cs1, custom
from .custom import AppSpec, PermissionDeclaration

__all__ = [
    "AppSpec",
    "PermissionDeclaration",
    "ModelInfo",
    "get_model",
    "model_names",
    "build_system",
    "cs1",
    "custom",
]


@dataclass(frozen=True)
class ModelInfo:
    name: str
    params: tuple[str, ...]
    invariants: tuple[str, ...]
    build: Callable[[Mapping[str, int], Sequence[AppSpec]], TransitionSystem]


def _build_cs1(params: Mapping[str, int], apps: Sequence[AppSpec]) -> TransitionSystem:
    if "apps" not in params:
        raise ConfigurationError("model aps_cs1 requires the 'apps' parameter")
    return cs1.build_system(params["apps"])


def _build_custom(params: Mapping[str, int],
                  apps: Sequence[AppSpec]) -> TransitionSystem:
    return custom.build_system(apps)


_REGISTRY = {
    cs1.MODEL_NAME: ModelInfo(cs1.MODEL_NAME, ("apps",),
                              cs1.INVARIANT_NAMES, _build_cs1),
    custom.MODEL_NAME: ModelInfo(custom.MODEL_NAME, (),
                                 custom.INVARIANT_NAMES, _build_custom),
}


def model_names() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


def get_model(name: str) -> ModelInfo:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ConfigurationError(f"unknown model {name!r}") from None


def build_system(scenario) -> TransitionSystem:
    """Instantiate the scenario's model and restrict it to the invariants
    the scenario asks to check, in the scenario's order."""
    info = get_model(scenario.model_name)
    system = info.build(scenario.params, scenario.app_specs)
    return system.with_invariants(scenario.check_list)
