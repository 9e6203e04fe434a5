"""Single place where jax is configured; everything downstream is float64.

Compiled transport loops are cached on disk between processes under
``$TRACTORLAB_JAX_CACHE`` (default ``~/.cache/tractorlab/jax``); set it to an
empty string to disable the cache.
"""
import os
from pathlib import Path

import jax

jax.config.update("jax_enable_x64", True)

_cache = os.environ.get("TRACTORLAB_JAX_CACHE", str(Path.home() / ".cache" / "tractorlab" / "jax"))
if _cache:
    jax.config.update("jax_compilation_cache_dir", _cache)
    jax.config.update("jax_persistent_cache_min_compile_time_secs", 0.5)

import jax.numpy as jnp  # noqa: E402

__all__ = ["jax", "jnp"]
