from enum import Enum


class Constants:
    DEFAULT_FUEL = 1_000_000
    DEFAULT_ORACLE_FUEL = 10_000
    DEFAULT_STYLE = "compact"
    BENCH_SLACK = 64
    BENCH_MIN_N = 1
    BENCH_MAX_N = 9
    MAX_FRESH_INDEX = 2**63 - 1

    EXIT_OK = 0
    EXIT_USAGE = 1
    EXIT_FUEL = 2
    EXIT_VERIFY = 3

    POTENTIAL_CSV_HEADER = ["step", "rule", "phi_config", "phi_store"]
    BENCH_CSV_HEADER = ["family", "n", "engine", "measured", "expected", "match"]
    KN_MATCH = "external, not implemented"


class Rule(int, Enum):
    def __new__(cls, value, label):
        obj = int.__new__(cls, value)
        obj._value_ = value
        obj.label = label
        return obj

    APP = (1, "Push argument")
    ABS = (2, "Annotate abstraction")
    FORCE = (3, "Force thunk")
    LOOKUP = (4, "Read value")
    MEMO = (5, "Memoize")
    BETA = (6, "Beta")
    NORMALIZE_BODY = (7, "Normalize under lambda")
    REUSE = (8, "Reuse normal form")
    ARG_NORMALIZE = (9, "Normalize argument")
    REBUILD_APP = (10, "Rebuild application")
    REBUILD_ABS = (11, "Rebuild abstraction")


class GhostRule(str, Enum):
    APP = "1"
    ABS = "2"
    FORCE = "3"
    LOOKUP = "4"
    MEMO = "5"
    MEMO_NORMAL = "5'"
    BETA = "6"
    NORMALIZE_BODY = "7"
    REUSE = "8"
    ARG_NORMALIZE = "9"
    COERCE = "9a"
    REBUILD_APP = "10"
    REBUILD_ABS = "11"

    @property
    def projected(self):
        """The RKNL rule id this ghost rule stands for, None for silent steps."""
        if self is GhostRule.COERCE:
            return None
        if self is GhostRule.MEMO_NORMAL:
            return int(Rule.MEMO)
        return int(self.value)


class Engine(str, Enum):
    NO = "no"
    RKNL = "rknl"
    RKNL_NO8 = "rknl-no8"
    KL = "kl"
