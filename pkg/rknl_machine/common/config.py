"""
Get the configuration file from /opt/rknl/etc/rknl.cfg
"""

import os
import logging
from rknl_machine.common.constants import Constants

try:
    import ConfigParser
except ImportError:
    import configparser as ConfigParser

log = logging.getLogger(__name__)


def config_get(section, option, raise_exception=True, default=None):
    """
        Return the string value for a given option in a section

        :param section: the named section.
        :param option: the named option.
        :param raise_exception: Boolean to raise or not NoOptionError or NoSectionError.
        :param default: the default value if not found.
    .
        :returns: the configuration value.
    """
    try:
        return __CONFIG.get(section, option)
    except (ConfigParser.NoOptionError, ConfigParser.NoSectionError) as err:
        if raise_exception and default is None:
            raise err
        return default


def config_set(section, option, value, raise_exception=True):
    try:
        return __CONFIG.set(section, option, value)
    except ConfigParser.NoSectionError:
        __CONFIG.add_section(section)
        return __CONFIG.set(section, option, value)


# interpolation off: log formats carry '%' and '{'
__CONFIG = ConfigParser.ConfigParser(interpolation=None)

__CONFIGFILES = list()
for i in ["RKNL_HOME", "VIRTUAL_ENV"]:
    if i in os.environ:
        __CONFIGFILES.append(f"{os.environ[i]}/config/rknl.cfg")
__CONFIGFILES.append("/opt/rknl/etc/rknl.cfg")

__HAS_CONFIG = False
for configfile in __CONFIGFILES:
    __HAS_CONFIG = __CONFIG.read(configfile) == [configfile]
    if __HAS_CONFIG:
        break

if not __HAS_CONFIG:
    log.debug(
        "No configuration file found, continuing with defaults"
        "\n\trknl looks in the following places for a configuration file, in order:"
        "\n\t${RKNL_HOME}/config/rknl.cfg"
        "\n\t${VIRTUAL_ENV}/config/rknl.cfg"
        "\n\t/opt/rknl/etc/rknl.cfg"
    )


class Config:
    def __init__(
        self,
        fuel: int = None,
        oracle_fuel: int = None,
        style: str = None,
        bench_slack: int = None,
    ):
        if fuel is not None:
            self.fuel = fuel
        else:
            self.fuel = int(config_get("machine", "fuel", default=str(Constants.DEFAULT_FUEL)))
        if oracle_fuel is not None:
            self.oracle_fuel = oracle_fuel
        else:
            self.oracle_fuel = int(config_get("oracle", "bypass_fuel",
                                              default=str(Constants.DEFAULT_ORACLE_FUEL)))
        if style:
            self.style = style
        else:
            self.style = config_get("output", "style", default=Constants.DEFAULT_STYLE)
        if bench_slack is not None:
            self.bench_slack = bench_slack
        else:
            self.bench_slack = int(config_get("bench", "slack", default=str(Constants.BENCH_SLACK)))

        self.max_fresh_index = int(config_get("machine", "max_fresh_index",
                                              default=str(Constants.MAX_FRESH_INDEX)))
