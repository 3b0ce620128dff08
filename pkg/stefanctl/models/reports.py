# stefanctl/models/reports.py
from pydantic import BaseModel, ConfigDict, Field
from typing import Dict, List, Optional, Union
from .common import CheckStatus, ControllerMode, ErrorReport, FloatArray, SetpointRelaxation
from .trajectory import Termination


class AssumptionViolation(BaseModel):
    assumption: str
    detail: str
    value: Optional[float] = None


class ValidationVerdict(BaseModel):
    ok: bool
    violations: List[AssumptionViolation] = Field(default_factory=list)

    def names(self) -> List[str]:
        return [v.assumption for v in self.violations]


class Inequality(BaseModel):
    """One checked inequality; margin is positive on the safe side."""
    status: CheckStatus
    margin: Optional[float] = None
    bound: Optional[float] = None

    @property
    def ok(self) -> bool:
        return self.status == CheckStatus.SATISFIED


class GainCheck2nd(BaseModel):
    order: int = 2
    min_setpoint: float
    setpoint: Inequality
    assumption3_ok: bool
    assumption4: Optional[Inequality] = None
    assumption4_ok: bool = False
    c2_safety_bound: Optional[float] = None
    branch: Optional[str] = None
    c2_bar: Optional[float] = None
    c2_barbar: Optional[float] = None
    theorem: Optional[Inequality] = None
    theorem_cond_ok: bool = False
    hurwitz_ok: bool = False
    closed_loop_eigenvalues: List[float] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


class GainCheck3rd(BaseModel):
    order: int = 3
    assumption6: Inequality
    assumption6_ok: bool
    setpoint_relaxation: SetpointRelaxation
    min_setpoint: Optional[float] = None
    setpoint: Optional[Inequality] = None
    assumption7_ok: bool = False
    c3_bar: Optional[float] = None
    c3_bar_unbounded: bool = False
    c3_upper_terms: Dict[str, Optional[float]] = Field(default_factory=dict)
    c3_lower: Optional[Inequality] = None
    c3_upper: Optional[Inequality] = None
    assumption8_ok: bool = False
    hurwitz_ok: bool = False
    closed_loop_eigenvalues: List[float] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


class LyapunovCert(BaseModel):
    """P, Q, S and Lambda for one (lambda1, kappa2) choice."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    order: int
    lambda1: float
    kappa2: float
    P: FloatArray
    Q: FloatArray
    residual_max_eig: float
    p_min_eig: float
    S: Optional[FloatArray] = None
    Lambda: Optional[FloatArray] = None
    lambda_min_eig: Optional[float] = None
    positivity_lhs: Optional[float] = None
    positivity_rhs: Optional[float] = None
    positivity_limit_ok: Optional[bool] = None
    lyap_ineq_ok: bool = False
    lambda_pd_ok: bool = False


class KappaSample(BaseModel):
    kappa2: float
    lambda_min_eig: float
    positivity_lhs: Optional[float] = None


class CertificateReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    best: LyapunovCert
    sweep: List[KappaSample]
    lambda_pd_found: bool
    positivity_limit_ok: Optional[bool] = None
    sufficient_case: Optional[bool] = None


class TransformedState(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x: FloatArray
    w: FloatArray
    w_x: FloatArray
    X: FloatArray


class LyapunovValues(BaseModel):
    V: float
    Phi: float


class ConstraintVerdict(BaseModel):
    name: str
    applicable: bool = True
    satisfied: bool
    worst_margin: Optional[float] = None
    first_violation_time: Optional[float] = None


class SafetyReport(BaseModel):
    constraints: Dict[str, ConstraintVerdict]
    gronwall: ConstraintVerdict
    implication_holds: bool
    all_satisfied: bool

    def violated(self) -> List[str]:
        return [name for name, c in self.constraints.items() if c.applicable and not c.satisfied]


class CbfValues(BaseModel):
    h1: float
    h2: float


class ResidualSummary(BaseModel):
    """Per-step residual with max and RMS."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    residual: FloatArray
    max: float
    rms: float


class DecaySummary(BaseModel):
    rate: Optional[float] = None
    max_relative_increase: Optional[float] = None
    monotone: bool = False


class ResidualStats(BaseModel):
    max: Optional[float] = None
    rms: Optional[float] = None

    @classmethod
    def of(cls, summary: Optional[ResidualSummary]) -> "ResidualStats":
        if summary is None:
            return cls()
        return cls(max=summary.max, rms=summary.rms)


class CheckReport(BaseModel):
    """Admissibility of one configuration: initial data, gains and certificate."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    schema_version: int = 1
    name: str
    order: int
    validation: ValidationVerdict
    gains: Optional[Union[GainCheck2nd, GainCheck3rd]] = None
    certificate: Optional[CertificateReport] = None
    errors: List[ErrorReport] = Field(default_factory=list)

    def gating_failures(self) -> List[str]:
        """Violations that forbid a run: initial data and the setpoint restriction."""
        failures = self.validation.names()
        if isinstance(self.gains, GainCheck2nd) and not self.gains.assumption3_ok:
            failures.append("assumption3_setpoint")
        if isinstance(self.gains, GainCheck3rd) and self.gains.assumption6_ok and not self.gains.assumption7_ok:
            failures.append("assumption7_setpoint")
        return failures


class RunReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    schema_version: int = 1
    name: str
    order: int
    mode: ControllerMode
    completed: bool
    termination: Optional[Termination] = None
    check: CheckReport
    safety: SafetyReport
    phi_decay: DecaySummary
    final_s: float
    final_error: Optional[float] = None
    energy_balance: ResidualStats = Field(default_factory=ResidualStats)
    qc_ode_residual: ResidualStats = Field(default_factory=ResidualStats)
    cbf_residual: ResidualStats = Field(default_factory=ResidualStats)
    max_target_residual: Optional[float] = None
    target_ok: Optional[bool] = None
    max_wx_origin: Optional[float] = None
    runtime_s: float
    timings: Dict[str, float] = Field(default_factory=dict)
    exit_code: int
