"""
    Exceptions used with rknl-machine.

    The base exception class is :class:`. RKNLException`.
    Exceptions which are raised are all subclasses of it.

"""


class RKNLException(Exception):
    """
    To correctly use this class, inherit from it and define
    a 'message' property. That message will get printf'd
    with the keyword arguments provided to the constructor.
    """

    def __init__(self, *args, **kwargs):
        super(RKNLException, self).__init__(*args)
        self._message = "An unknown exception occurred."
        self.args = args
        self.kwargs = kwargs
        self.error_code = 1
        self._error_string = None

    def __str__(self):
        try:
            self._error_string = self._message % self.kwargs
        except Exception:
            self._error_string = self._message
        if len(self.args) > 0:
            args = [f"{arg}" for arg in self.args if arg]
            self._error_string = (self._error_string + f"\nDetails: \n {args}")
        return self._error_string.strip()


class ParseError(RKNLException):
    """
    Malformed concrete syntax. ``offset`` is a byte offset into the UTF-8 input.
    """

    def __init__(self, *args, **kwargs):
        super(ParseError, self).__init__(*args, **kwargs)
        self._message = "Syntax error at byte offset %(offset)s: %(reason)s."
        self.offset = kwargs.get("offset")
        self.error_code = 2001


class FuelExhausted(RKNLException):
    """
    Raised by the oracle when it runs out of fuel; carries the partial term.
    """

    def __init__(self, *args, **kwargs):
        super(FuelExhausted, self).__init__(*args, **kwargs)
        self._message = "Fuel exhausted after %(steps)s steps."
        self.term = kwargs.get("term")
        self.steps = kwargs.get("steps")
        self.error_code = 2002


class IllFormed(RKNLException):
    def __init__(self, *args, **kwargs):
        super(IllFormed, self).__init__(*args, **kwargs)
        self._message = "Ill-formed machine configuration."
        self.error_code = 2003


class WriteOnceViolation(IllFormed):
    def __init__(self, *args, **kwargs):
        super(WriteOnceViolation, self).__init__(*args, **kwargs)
        self._message = "Store cell %(location)s is already done."
        self.error_code = 2004


class FreshExhausted(RKNLException):
    def __init__(self, *args, **kwargs):
        super(FreshExhausted, self).__init__(*args, **kwargs)
        self._message = "Fresh name counter for %(base)s overflowed."
        self.error_code = 2005


class ShapeViolation(RKNLException):
    """
    No ghost transition matches: the shape invariant does not hold.
    """

    def __init__(self, *args, **kwargs):
        super(ShapeViolation, self).__init__(*args, **kwargs)
        self._message = "No ghost transition applies."
        self.error_code = 2006


class StuckOpen(RKNLException):
    def __init__(self, *args, **kwargs):
        super(StuckOpen, self).__init__(*args, **kwargs)
        self._message = "Unbound variable %(name)s evaluated by the weak machine."
        self.error_code = 2007


class NotWeak(RKNLException):
    def __init__(self, *args, **kwargs):
        super(NotWeak, self).__init__(*args, **kwargs)
        self._message = "Configuration is not a weak configuration."
        self.error_code = 2008


class OutOfRange(RKNLException):
    def __init__(self, *args, **kwargs):
        super(OutOfRange, self).__init__(*args, **kwargs)
        self._message = "Parameter n=%(n)s is outside %(lo)s..%(hi)s."
        self.error_code = 2009


class SizeOverflow(RKNLException):
    def __init__(self, *args, **kwargs):
        super(SizeOverflow, self).__init__(*args, **kwargs)
        self._message = "Metric exceeds the limit %(limit)s."
        self.error_code = 2010


class InvalidInvocation(RKNLException):
    def __init__(self, *args, **kwargs):
        super(InvalidInvocation, self).__init__(*args, **kwargs)
        self._message = "Invalid invocation."
        self.error_code = 2011
