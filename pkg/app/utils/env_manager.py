import os
from typing import Optional

class EnvManager(object):
    def __init__(self) -> None:
        pass

    def get_env_variable(self, key, default: Optional[str] = None):
        value = os.environ.get(key)
        if value is None or value == '':
            if default is None:
                raise KeyError(key)
            return default
        return value
