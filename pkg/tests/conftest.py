"""Shared test configuration.

Hypothesis runs derandomised with a fixed budget so the suite is
deterministic and CI-friendly; individual tests can override locally.
"""
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=30,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")
