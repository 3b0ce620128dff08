# stefanctl/config/settings.py
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import List, Optional


class Settings(BaseSettings):
    # Application
    app_name: str = "stefanctl"
    debug: bool = False
    output_dir: str = "runs"

    # Validation and monitoring tolerances
    tol_bc: float = 1e-9          # K, T0(s0) = Tm compatibility
    tol_temp: float = 1e-6        # K, T >= Tm
    tol_mono: float = 1e-8        # m/s, sdot >= 0 and Gronwall bound
    tol_grad: float = 1e-6        # K/m, Tx(s) <= 0
    tol_pos: float = 1e-9         # m, s0 <= s <= s_r
    tol_qc_rel: float = 1e-9      # relative to max|qc|
    tol_lyap: float = 1e-3        # relative step growth of Phi
    tol_target_rel: float = 1e-8  # relative to max|u|, w(s) = 0
    gain_margin_rel: float = 1e-12

    # Recording
    snapshot_interval_s: float = 0.1

    # Lyapunov certificates
    lambda1: float = 1.0
    kappa2_grid: List[float] = Field(default_factory=lambda: [10.0 ** p for p in range(9)])

    # Sweeps
    max_jobs: Optional[int] = None

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="STEFANCTL_",
        case_sensitive=False,
        extra="ignore",
    )


settings = Settings()
