class BregmoreauError(Exception):
    """ Base class for every error raised by bregmoreau.
    """
    pass


class DomainError(BregmoreauError, ValueError):
    """ A kernel or objective was evaluated outside of its domain, or a
    point that must lie in the interior U of dom f does not.
    """
    pass


class InvalidParamError(BregmoreauError, ValueError):
    pass


class ParseError(InvalidParamError):
    pass


class InvalidSetError(BregmoreauError, ValueError):
    pass


class SetupError(BregmoreauError):
    """ The problem is ill posed, typically because U and dom(theta) do not
    intersect.
    """
    pass


class InfeasibleSetError(SetupError):
    pass


class SolverError(BregmoreauError):
    """ A root finder could not bracket or locate a solution. `certificate`
    holds the coercivity certificate of the problem when it is known.
    """

    def __init__(self, message, certificate=None, gamma=None):
        super(SolverError, self).__init__(message)
        self.certificate = certificate
        self.gamma = gamma


class ConvergenceError(SolverError):

    def __init__(self, message, trajectory=None, **kwargs):
        super(ConvergenceError, self).__init__(message, **kwargs)
        self.trajectory = trajectory or []


class UnboundedConjugateError(BregmoreauError):
    pass
