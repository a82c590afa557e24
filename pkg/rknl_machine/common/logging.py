import os
import sys
import logging
import logging.config
from rknl_machine.common.config import config_get


def rknl_log_formatter():
    config_logformat = config_get(
        "common",
        "logformat",
        raise_exception=False,
        default="{asctime} {name:<29} {process} {levelname:>8} {message}",
    )
    return logging.Formatter(fmt=config_logformat, style='{')


def setup_default_logging():
    """
    Configures the logging by setting the output stream to stderr and
    configures log level and log format.

    Standard output is reserved for normal forms, traces and CSV.
    """
    config_loglevel = getattr(logging, config_get("common", "loglevel", raise_exception=False,
                                                  default="WARNING").upper())

    stderrhandler = logging.StreamHandler(stream=sys.stderr)
    stderrhandler.setFormatter(rknl_log_formatter())
    stderrhandler.setLevel(config_loglevel)
    logging.basicConfig(level=config_loglevel, handlers=[stderrhandler])


def setup_logging():
    """
    Configures logging from a logging.conf file when one is found,
    otherwise falls back to :func:`setup_default_logging`.
    """

    configfiles = list()

    logging_config_path = config_get("common", "logging_config", raise_exception=False, default=None)
    if logging_config_path:
        configfiles.append(logging_config_path)

    for i in ["RKNL_HOME", "VIRTUAL_ENV"]:
        if i in os.environ:
            configfiles.append(f"{os.environ[i]}/etc/logging.conf")
    configfiles.append("/opt/rknl/etc/logging.conf")

    has_config = False
    for configfile in configfiles:
        if not os.path.exists(configfile):
            continue
        try:
            logging.config.fileConfig(configfile, disable_existing_loggers=False)
            has_config = True
        except Exception:
            has_config = False
        if has_config:
            break

    if not has_config:
        setup_default_logging()
