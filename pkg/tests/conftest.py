from hypothesis import HealthCheck, settings

# Derandomized so that the property suites are repeatable run to run.
settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")
