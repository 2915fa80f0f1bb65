"""
Error hierarchy shared by every wittkit module.

Each error carries a stable ``code`` which the command line reports in
its machine-readable error document.
"""


class WittkitError(Exception):
    """Base class for all input and validation errors."""

    code = "WittkitError"

    def __init__(self, detail=""):
        super().__init__(detail)
        self.detail = detail

    def to_json(self):
        return {"error": self.code, "detail": self.detail}


def _error(name, doc):
    return type(name, (WittkitError,), {"code": name, "__doc__": doc})


MalformedInput = _error("MalformedInput", "Input document does not match its schema.")
NonPure = _error("NonPure", "A maximal simplex has dimension below the complex dimension.")
DegreeOutOfRange = _error("DegreeOutOfRange", "Chain degree outside 0..n.")
NonOrientable = _error("NonOrientable", "Orientation propagation met a sign conflict.")
NotPseudomanifold = _error("NotPseudomanifold", "Pseudomanifold conditions fail.")
NotFullSubcomplex = _error(
    "NotFullSubcomplex", "A skeleton is not a full subcomplex; subdivide first."
)
CodimOneStratum = _error("CodimOneStratum", "Skeleton X_{n-1} differs from X_{n-2}.")
FrontierViolation = _error(
    "FrontierViolation", "A stratum closure meets another stratum only partially."
)
NotDense = _error("NotDense", "The regular part is not dense.")
NoVertexInStratum = _error(
    "NoVertexInStratum", "The stratum has no top simplex made of its own vertices."
)
InvalidStratum = _error("InvalidStratum", "Links are only formed for singular strata.")
LinkDimensionMismatch = _error(
    "LinkDimensionMismatch", "Link dimension is not n - dim Y - 1."
)
LinkInconsistent = _error(
    "LinkInconsistent", "Sample links of one stratum have different IH ranks."
)
InvalidPerversity = _error("InvalidPerversity", "Not a Goresky-MacPherson perversity.")
UnsupportedDepth = _error(
    "UnsupportedDepth", "Pairing needs isolated singular points or no singular set."
)
WrongDimensionParity = _error("WrongDimensionParity", "Odd dimensional input.")
NotManifoldInput = _error("NotManifoldInput", "Input is not a closed oriented manifold.")
InvalidTree = _error("InvalidTree", "Resolution tree is inconsistent.")
InvalidSpectrum = _error("InvalidSpectrum", "Spectrum data is inconsistent.")
InvalidArgument = _error("InvalidArgument", "Argument out of range.")
