"""Named custom permissions with protection levels and install-order precedence.

Apps declare permissions by name at one of two protection levels; the first
installed app to declare a name fixes its active level and stays its definer
(later installs never overwrite the registry). Requests against a
normal-level name are granted automatically; requests against a
dangerous-level name fork on the user's one-shot allow/deny decision.

The `escalation_free` invariant fails exactly when an automatically granted
name is declared dangerous by some installed app: an app then holds, without
any consent prompt, a permission that another installed app considers
dangerous. Installing a normal-level definer first and the dangerous-level
definer second reaches that situation in three steps.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from ..errors import ConfigurationError
from ..kernel import (ActionLabel, State, TransitionSystem, VariableDecl,
                      canonical_encode)

NORMAL = "normal"
DANGEROUS = "dangerous"
PROTECTION_LEVELS = (NORMAL, DANGEROUS)

AUTO = "AUTO"
CONSENT = "CONSENT"
DENIED = "DENIED"

MODEL_NAME = "custom_permissions"
INVARIANT_NAMES = ("escalation_free",)


@dataclass(frozen=True)
class PermissionDeclaration:
    name: str
    level: str

    def __post_init__(self):
        if not self.name:
            raise ConfigurationError("permission name must be non-empty")
        if self.level not in PROTECTION_LEVELS:
            raise ConfigurationError(
                f"protection level must be one of {PROTECTION_LEVELS}, "
                f"not {self.level!r}"
            )


@dataclass(frozen=True)
class AppSpec:
    """An app's closed-world interface: what it declares and may request.

    Declarations and requests are normalized to name-ascending tuples so
    structurally equal specs compare equal regardless of construction order.
    """

    id: str
    declares: tuple[PermissionDeclaration, ...] = ()
    requests: tuple[str, ...] = ()

    def __post_init__(self):
        decls = tuple(sorted(self.declares, key=lambda d: d.name))
        names = [d.name for d in decls]
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise ConfigurationError(
                f"app {self.id!r} declares {dup!r} more than once"
            )
        object.__setattr__(self, "declares", decls)
        object.__setattr__(self, "requests", tuple(sorted(set(self.requests))))


@dataclass(frozen=True)
class DeviceState:
    """Installed set, the active permission registry (first definer wins),
    and the per-(app, name) grant outcome including one-shot denials."""

    installed: frozenset[str] = frozenset()
    registry: tuple[tuple[str, tuple[str, str]], ...] = ()  # name -> (level, definer)
    grants: frozenset[tuple[str, str, str]] = frozenset()   # (app, name, mode)
    denied: frozenset[tuple[str, str]] = frozenset()

    def registry_map(self) -> dict[str, tuple[str, str]]:
        return dict(self.registry)


def _with_registry(s: DeviceState, reg: dict[str, tuple[str, str]]) -> DeviceState:
    return replace(s, registry=tuple(sorted(reg.items())))


def install(s: DeviceState, app: AppSpec) -> Optional[DeviceState]:
    """Install `app` unless already installed; register its declarations
    only where the name is still unclaimed."""
    if app.id in s.installed:
        return None
    reg = s.registry_map()
    for decl in app.declares:
        if decl.name not in reg:
            reg[decl.name] = (decl.level, app.id)
    return _with_registry(replace(s, installed=s.installed | {app.id}), reg)


def request(s: DeviceState, app: AppSpec,
            name: str) -> Optional[list[tuple[ActionLabel, DeviceState]]]:
    """Successors of `app` requesting `name`, or None when disabled.

    Disabled unless the app is installed, lists the name in its requests,
    the name is registered, and the pair is neither granted nor denied yet.
    A normal-level name yields the single automatic grant; a dangerous-level
    name yields the allow and deny branches of the user decision.
    """
    if app.id not in s.installed or name not in app.requests:
        return None
    reg = s.registry_map()
    if name not in reg:
        return None
    if any(a == app.id and n == name for a, n, _ in s.grants):
        return None
    if (app.id, name) in s.denied:
        return None
    params = (("a", app.id), ("n", name))
    if reg[name][0] == NORMAL:
        granted = replace(s, grants=s.grants | {(app.id, name, AUTO)})
        return [(ActionLabel("Request", params), granted)]
    allowed = replace(s, grants=s.grants | {(app.id, name, CONSENT)})
    refused = replace(s, denied=s.denied | {(app.id, name)})
    return [(ActionLabel("UserAllow", params), allowed),
            (ActionLabel("UserDeny", params), refused)]


def escalation_free(s: DeviceState, apps: Sequence[AppSpec]) -> bool:
    """False when an AUTO grant exists for a name some installed app
    declares dangerous."""
    dangerous = {d.name for a in apps if a.id in s.installed
                 for d in a.declares if d.level == DANGEROUS}
    return not any(mode == AUTO and name in dangerous
                   for _, name, mode in s.grants)


def successors(s: DeviceState,
               apps: Sequence[AppSpec]) -> list[tuple[ActionLabel, DeviceState]]:
    """Per app ascending by id: Install if enabled, then the request
    branches for each requested name ascending."""
    out: list[tuple[ActionLabel, DeviceState]] = []
    for app in sorted(apps, key=lambda a: a.id):
        installed = install(s, app)
        if installed is not None:
            out.append((ActionLabel("Install", (("a", app.id),)), installed))
        for name in app.requests:
            branches = request(s, app, name)
            if branches is not None:
                out.extend(branches)
    return out


def initial_state() -> DeviceState:
    return DeviceState()


def build_system(apps: Sequence[AppSpec]) -> TransitionSystem:
    """Package a closed-world scenario as a kernel TransitionSystem."""
    apps = sorted(apps, key=lambda a: a.id)
    if not apps:
        raise ConfigurationError("custom_permissions needs at least one app")
    if len({a.id for a in apps}) != len(apps):
        raise ConfigurationError("app ids must be unique")

    ids = tuple(a.id for a in apps)
    names = tuple(sorted({d.name for a in apps for d in a.declares}))
    pairs = tuple((a.id, n) for a in apps for n in a.requests)
    if any(":" in a.id for a in apps):
        # ":" separates app and name in the grants variable's keys.
        raise ConfigurationError("app ids must not contain ':'")
    decls = (
        VariableDecl("installed", ids, (0, 1)),
        VariableDecl("registryLevel", names, ("",) + PROTECTION_LEVELS),
        VariableDecl("registryDefiner", names, ("",) + ids),
        VariableDecl("grants", tuple(f"{a}:{n}" for a, n in pairs),
                     ("", AUTO, CONSENT, DENIED)),
    )

    def encode(s: DeviceState) -> State:
        reg = s.registry_map()
        grant_modes = {}
        for a, n in pairs:
            if (a, n) in s.denied:
                grant_modes[f"{a}:{n}"] = DENIED
            elif (a, n, AUTO) in s.grants:
                grant_modes[f"{a}:{n}"] = AUTO
            elif (a, n, CONSENT) in s.grants:
                grant_modes[f"{a}:{n}"] = CONSENT
            else:
                grant_modes[f"{a}:{n}"] = ""
        return canonical_encode(decls, {
            "installed": {i: int(i in s.installed) for i in ids},
            "registryLevel": {n: reg[n][0] if n in reg else "" for n in names},
            "registryDefiner": {n: reg[n][1] if n in reg else "" for n in names},
            "grants": grant_modes,
        })

    def decode(state: State) -> DeviceState:
        installed_v, level_v, definer_v, grants_v = (
            tuple(v for _, v in items) for _, items in state.assignment)
        installed = frozenset(i for i, bit in zip(ids, installed_v) if bit)
        registry = {n: (lv, df) for n, lv, df in zip(names, level_v, definer_v)
                    if lv != ""}
        grants = frozenset((a, n, mode) for (a, n), mode in zip(pairs, grants_v)
                           if mode in (AUTO, CONSENT))
        denied = frozenset((a, n) for (a, n), mode in zip(pairs, grants_v)
                           if mode == DENIED)
        return _with_registry(
            DeviceState(installed=installed, grants=grants, denied=denied),
            registry)

    def kernel_successors(state: State):
        return [(label, encode(t)) for label, t in successors(decode(state), apps)]

    return TransitionSystem(
        name=MODEL_NAME,
        variables=decls,
        initial_states=(encode(initial_state()),),
        successors=kernel_successors,
        invariants=(
            ("escalation_free", lambda st: escalation_free(decode(st), apps)),
        ),
    )
