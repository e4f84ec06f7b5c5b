from dataclasses import dataclass, replace
from fractions import Fraction


@dataclass(frozen=True)
class Settings:
    """
    Caps, guards and defaults shared by every operation.

    Operations take an optional ``settings`` keyword; when omitted they use
    ``DEFAULT_SETTINGS``.
    """

    # k-gonal validation: exhaustive up to this many vertices when k >= 5
    kgonal_exhaustive_cap: int = 12
    kgonal_samples: int = 200_000
    kgonal_seed: int = 0

    # alternating-cycle checker: largest cycle size accepted
    max_cycle_cap: int = 6
    # constraint enumeration (triples) refuses larger instances
    triple_enumeration_cap: int = 64

    # oracles
    extension_guard: int = 20
    brute_force_guard: int = 10
    cover_variable_guard: int = 64

    # repair loop stops after factor * n**2 rounds
    repair_iteration_factor: int = 2

    # fractional cover
    mwu_eps: Fraction = Fraction(1, 20)
    mwu_budget_factor: int = 8

    # witness search
    witness_max_n: int = 6

    def override(self, **changes) -> "Settings":
        return replace(self, **changes)


DEFAULT_SETTINGS = Settings()
