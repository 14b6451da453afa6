"""
Exceptions raised by the AirCon simulator.
"""


class AirconError(Exception):
    """
    Base class for all the errors raised by this package.
    """


class InvalidInputError(AirconError, ValueError):
    """
    An argument is outside the domain of the operation it was passed to.
    """


class ConfigurationError(AirconError):
    """
    A configuration value is missing, malformed or unsupported.

    :param message: The error message.
    :param key: The dotted path of the offending configuration key, if known.
    """

    def __init__(self, message, key=None):
        if key:
            message = '{key}: {message}'.format(key=key, message=message)

        super().__init__(message)
        self.key = key


class EstimationError(AirconError):
    """
    Channel state information could not be estimated.
    """


class DeepFadeError(EstimationError):
    """
    Too few usable pilot positions remain for a user once deep fades are
    excluded.

    :param user: The index of the user whose channel is in a deep fade.
    :param usable: The number of pilot positions left.
    """

    def __init__(self, user, usable):
        super().__init__(
            'user {user} has {usable} usable pilot position(s) out of a '
            'required 2'.format(user=user, usable=usable)
        )
        self.user = user
        self.usable = usable


class OutputError(AirconError):
    """
    Writing results failed.

    :param message: The error message.
    :param rows_written: How many rows made it to the output before the
        failure.
    """

    def __init__(self, message, rows_written=0):
        super().__init__(message)
        self.rows_written = rows_written
