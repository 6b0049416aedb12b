import hypothesis

# the sandbox this runs in has noisy timing; per-example deadlines flake
hypothesis.settings.register_profile("sandbox", deadline=None)
hypothesis.settings.load_profile("sandbox")
