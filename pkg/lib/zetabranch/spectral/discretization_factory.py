from .chebyshev import ChebyshevFirstKind, ChebyshevLobatto

class DiscretizationFactory:
    @staticmethod
    def create_discretization(type, **kwargs):
        if type == "chebyshev":
            return ChebyshevFirstKind(**kwargs)
        if type == "chebyshev-lobatto":
            return ChebyshevLobatto(**kwargs)
        else:
            raise ValueError(f"Unknown discretization type: {type}")
