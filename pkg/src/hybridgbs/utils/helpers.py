import os
from typing import Optional


def get_env(key: str, default: Optional[str] = None) -> Optional[str]:
    """Environment variable, or default when unset or empty."""
    value = os.environ.get(key)
    if value is None or value == "":
        return default
    return value
