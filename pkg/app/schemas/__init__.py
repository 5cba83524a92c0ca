from .bounds import FeasibilityReport, CountBoundResponse, MinKResponse, SignPatternResponse
from .coloring import ColoringCreate, ColoringResponse, ColorResponse, SearchRequest
from .reports import (
    BlueRunReport, BuildReport, Certificate, CheckResult, CoveringCertificate,
    RedPairWitness, SearchReport, SweepRow, VerificationReport
)
from .run import RunConfig, RunResponse

__all__ = [
    "FeasibilityReport", "CountBoundResponse", "MinKResponse", "SignPatternResponse",
    "ColoringCreate", "ColoringResponse", "ColorResponse", "SearchRequest",
    "BlueRunReport", "BuildReport", "Certificate", "CheckResult", "CoveringCertificate",
    "RedPairWitness", "SearchReport", "SweepRow", "VerificationReport",
    "RunConfig", "RunResponse"
]
