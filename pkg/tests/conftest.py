import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "nlswave",
    deadline=None,
    max_examples=25,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("nlswave")

# deterministic width for anything that fans out
os.environ.setdefault("NLSWAVE_THREADS", "1")
