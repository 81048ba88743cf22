class ZeroVectorError(ValueError):
    def __init__(self, what="gradient undefined at origin"):
        super().__init__(what)


class NotANormError(ValueError):
    def __init__(self, delta, msg="not a norm"):
        super().__init__(f"{msg} (delta={delta})")
        self.delta = delta


class ASCFinitenessError(RuntimeError):
    def __init__(self, iterations, norm=None):
        super().__init__(f"norm violates ASC finiteness: more than {iterations} refinement steps for {norm}")
        self.iterations = iterations
        self.norm = norm


class LatticeOverflowError(OverflowError):
    def __init__(self, vertex):
        super().__init__(f"lattice vertex {vertex} leaves the int64 range")
        self.vertex = vertex


class StencilAssemblyError(RuntimeError):
    def __init__(self, position, cause):
        super().__init__(f"stencil construction failed at z=({position[0]:.6g}, {position[1]:.6g}): {cause}")
        self.position = tuple(position)
        self.cause = cause


class EmptyDomainError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, iterations):
        super().__init__(f"AGSI failed to converge after {iterations} updates")
        self.iterations = iterations
