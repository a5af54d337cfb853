"""Process-wide numerical settings: tolerance profiles and the dimension cap."""

from __future__ import annotations

import contextlib
import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-9
    trace: float = 1e-9
    orth: float = 1e-9
    psd: float = 1e-9
    eig: float = 1e-8
    eig_clamp: float = 1e-12
    supp: float = 1e-10
    supp_leak: float = 1e-8
    cptp: float = 1e-9
    incoherent: float = 1e-10
    branch: float = 1e-14

    def scaled(self, factor: float) -> "Tolerances":
        return Tolerances(**{f.name: getattr(self, f.name) * factor
                             for f in dataclasses.fields(self)})


PROFILES = {
    "default": Tolerances(),
    "strict": Tolerances().scaled(1e-2),
    "loose": Tolerances().scaled(1e2),
}

DEFAULT_MAX_DIM = 4096


@dataclass
class _Settings:
    tol: Tolerances = dataclasses.field(default_factory=Tolerances)
    max_dim: int = DEFAULT_MAX_DIM
    profile: str = "default"


settings = _Settings()


def configure(profile: str | None = None, max_dim: int | None = None) -> None:
    """Select a tolerance profile and/or the maximum total dimension."""
    if profile is not None:
        if profile not in PROFILES:
            raise ValueError(f"unknown tolerance profile {profile!r}; "
                             f"choose from {sorted(PROFILES)}")
        settings.tol = PROFILES[profile]
        settings.profile = profile
    if max_dim is not None:
        if max_dim < 1:
            raise ValueError("max_dim must be positive")
        settings.max_dim = int(max_dim)


@contextlib.contextmanager
def override(profile: str | None = None, max_dim: int | None = None):
    saved = dataclasses.replace(settings)
    try:
        configure(profile=profile, max_dim=max_dim)
        yield settings
    finally:
        settings.tol, settings.max_dim, settings.profile = (
            saved.tol, saved.max_dim, saved.profile)
