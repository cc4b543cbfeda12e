from typing import Callable, Optional

from dependency_injector import containers, providers
from dotenv import find_dotenv, load_dotenv

from hybridgbs.api.v1.common import CalcSettings
from hybridgbs.kernel.errors import ConfigurationError
from hybridgbs.requests import Requester
from hybridgbs.utils.helpers import get_env

# environment variable names:
WORKERS = "HYBRIDGBS_WORKERS"
SERIES_RADIUS = "HYBRIDGBS_SERIES_RADIUS"
LOG_LEVEL = "HYBRIDGBS_LOG_LEVEL"


def calc_settings_from_env(
    defaults: Optional[dict] = None,
    get_env: Callable[[str, Optional[str]], Optional[str]] = get_env,
    dotenv: bool = True,
) -> CalcSettings:
    """CalcSettings from defaults, overridden by the HYBRIDGBS_* environment variables.

    A .env file in the working directory is loaded first, without replacing variables already set.
    """
    if dotenv:
        load_dotenv(find_dotenv(usecwd=True), override=False)
    values = dict(defaults or {})
    try:
        workers = get_env(WORKERS, None)
        if workers is not None:
            values["workers"] = int(workers)
        radius = get_env(SERIES_RADIUS, None)
        if radius is not None:
            values["series_radius"] = float(radius)
    except ValueError as e:
        raise ConfigurationError(f"invalid environment setting: {e}") from e
    return CalcSettings(**values)


class Container(containers.DeclarativeContainer):
    config = providers.Configuration(default={"calc_settings": {}})

    calc_settings = providers.Singleton(calc_settings_from_env, defaults=config.calc_settings)

    requester = providers.Singleton(Requester, settings=calc_settings)
