from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

SphereClass = Literal["general_n", "s7", "s5", "s3"]
FamilyKind = Literal["metric", "invariant"]
OutputFormat = Literal["json", "markdown"]
ConnectionName = Literal[
    "levi_civita", "canonical", "natural", "tanaka", "characteristic"
]

# Sphere parameter n implied by each class; general_n takes n from the caller
CLASS_N: Dict[str, Optional[int]] = {"general_n": None, "s7": 3, "s5": 2, "s3": 1}

# (complex parameters, needs coefficient list of this length) per class and kind
_PARAM_SHAPES: Dict[tuple, tuple] = {
    ("general_n", "metric"): (1, 0),
    ("general_n", "invariant"): (3, 0),
    ("s7", "metric"): (2, 0),
    ("s7", "invariant"): (4, 0),
    ("s5", "metric"): (3, 0),
    ("s5", "invariant"): (0, 13),
    ("s3", "metric"): (0, 0),
    ("s3", "invariant"): (0, 27),
}


class ComplexValue(BaseModel):
    """A complex number as it appears in reports and requests"""

    re: float = 0.0  # Real part
    im: float = 0.0  # Imaginary part

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def of(cls, z: complex) -> "ComplexValue":
        z = complex(z)
        return cls(re=z.real, im=z.imag)


class FamilyParams(BaseModel):
    """Parameters of one member of a closed-form connection family"""

    sphere_class: SphereClass  # Which sphere the family lives on
    kind: FamilyKind = "metric"  # Metric subfamily or the full invariant family
    q: List[ComplexValue] = []  # q1, q2, ... in order
    t: float = 0.0  # Real coefficient of beta_1 (or delta for invariant families)
    coefficients: List[float] = []  # Raw coefficients (s5 / s3 invariant)
    t_matrix: Optional[List[List[float]]] = None  # 3x3 matrix t_ij (s3 metric)

    @model_validator(mode="after")
    def _check_counts(self) -> "FamilyParams":
        n_complex, n_coeffs = _PARAM_SHAPES[(self.sphere_class, self.kind)]
        if len(self.q) != n_complex:
            raise ValueError(
                f"{self.sphere_class}/{self.kind} expects {n_complex} complex "
                f"q values, got {len(self.q)}"
            )
        if len(self.coefficients) != n_coeffs:
            raise ValueError(
                f"{self.sphere_class}/{self.kind} expects {n_coeffs} "
                f"coefficients, got {len(self.coefficients)}"
            )
        needs_matrix = (self.sphere_class, self.kind) == ("s3", "metric")
        if needs_matrix:
            rows = self.t_matrix or []
            if len(rows) != 3 or any(len(row) != 3 for row in rows):
                raise ValueError("s3/metric expects t_matrix as a 3x3 list")
        elif self.t_matrix is not None:
            raise ValueError("t_matrix is only accepted for s3/metric")
        return self

    @property
    def q_values(self) -> List[complex]:
        return [q.value for q in self.q]


class RunConfig(BaseModel):
    """Validated settings of one CLI or HTTP run"""

    command: str  # dims, connection, scan or verify
    sphere: Optional[SphereClass] = None  # Family class for connection/scan
    n: Optional[int] = Field(default=None, ge=1)  # Sphere parameter, S^(2n+1)
    r: Optional[float] = None  # Skew-torsion parameter
    q: Optional[ComplexValue] = None  # Complex skew parameter (s7, s5)
    params: Optional[FamilyParams] = None  # Explicit family member
    named: Optional[ConnectionName] = None  # Named connection
    r_grid: List[float] = []  # Scan values of r
    q_grid: List[ComplexValue] = []  # Scan values of q (s7, s5)
    tolerance: float = Field(default=1e-8, gt=0)  # Einstein/membership tolerance
    seed: int = 2024  # Sampling seed
    trials: int = Field(default=100, gt=0)  # Samples per battery
    output_format: OutputFormat = "json"  # Emitter


class BatteryResult(BaseModel):
    """Outcome of one verification battery"""

    name: str  # Registered battery name
    passed: bool  # Whether every check was inside tolerance
    max_residual: float  # Largest defect seen
    detail: str = ""  # Human-readable note


class ReportEnvelope(BaseModel):
    """Top-level JSON document emitted by every command"""

    command: str  # Command that produced the report
    config: Dict[str, Any]  # Echo of the run configuration
    results: Any  # Command-specific payload
    residuals: Dict[str, float] = {}  # Named numerical defects
    verdicts: Dict[str, Any] = {}  # Named boolean or label verdicts


class ConnectionRequest(BaseModel):
    """Request body for /api/connection"""

    sphere: Optional[SphereClass] = None
    n: Optional[int] = Field(default=None, ge=1)
    r: Optional[float] = None
    q: Optional[ComplexValue] = None
    params: Optional[FamilyParams] = None
    named: Optional[ConnectionName] = None
    tolerance: float = Field(default=1e-8, gt=0)


class ScanRequest(BaseModel):
    """Request body for /api/scan"""

    sphere: SphereClass
    n: Optional[int] = Field(default=None, ge=1)
    r_grid: List[float]
    q_grid: List[ComplexValue] = []
    tolerance: float = Field(default=1e-8, gt=0)


class VerifyRequest(BaseModel):
    """Request body for /api/verify"""

    seed: Optional[int] = None
    trials: int = Field(default=100, gt=0)
    batteries: Optional[List[str]] = None  # Subset to run; all when omitted
