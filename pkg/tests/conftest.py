import hypothesis

hypothesis.settings.register_profile(
    "bjj",
    deadline=None,
    derandomize=True,
    max_examples=30,
)
hypothesis.settings.load_profile("bjj")
