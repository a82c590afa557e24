from rknl_machine.machines.rknl import (DEFAULT_OPTIONS, NO8_OPTIONS, Arg, Cache, Config, ContConfig, EvalConfig,
                                        LApp, LamF, Machine, MachineOptions, RunResult, Terminal, Transition,
                                        config_eq, load, run, step, unload)
from rknl_machine.machines.stack import EMPTY_STACK, Stack
from rknl_machine.machines.store import (EMPTY_ENV, AnnotAbs, Closure, Done, FreshNames, Location, LocationKind,
                                         PlainTerm, Store, TodoClosure)

__all__ = [
    "DEFAULT_OPTIONS", "NO8_OPTIONS", "Arg", "Cache", "Config", "ContConfig", "EvalConfig", "LApp", "LamF",
    "Machine", "MachineOptions", "RunResult", "Terminal", "Transition", "config_eq", "load", "run", "step",
    "unload", "EMPTY_STACK", "Stack", "EMPTY_ENV", "AnnotAbs", "Closure", "Done", "FreshNames", "Location",
    "LocationKind", "PlainTerm", "Store", "TodoClosure",
]
