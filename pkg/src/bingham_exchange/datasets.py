"""Published summary data sets, available by name as sufficient statistics."""

from .model import SufficientStats

PRESETS = {
    # artificial data, n = 100
    "dataset1": SufficientStats(100, (0.30, 0.32)),
    "dataset2": SufficientStats(100, (0.02, 0.40)),
    # earthquake null axes: Christchurch before/after the Feb 2011 event, and South Island
    "cca": SufficientStats(50, (0.1152360, 0.1571938)),
    "ccb": SufficientStats(50, (0.1127693, 0.1987671)),
    "si": SufficientStats(32, (0.2288201, 0.3035098)),
}


def preset(name: str) -> SufficientStats:
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
