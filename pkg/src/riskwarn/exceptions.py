"""Exception types shared across the package."""


class ScenarioError(ValueError):
    """A scenario, schedule, or configuration value is invalid."""


class PerceptionError(ScenarioError):
    """A driver-error entry cannot be applied to the world."""
