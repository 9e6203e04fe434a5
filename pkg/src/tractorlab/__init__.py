from . import _jax  # noqa: F401  (enables float64 before anything else touches jax)
