# stefanctl/services/check_service.py
import logging
from stefanctl.core.analysis.lyapunov import certify
from stefanctl.core.controller.gains import check_gains_2nd, check_gains_3rd
from stefanctl.core.model.validation import validate_initial
from stefanctl.models.common import ErrorReport
from stefanctl.models.reports import CheckReport
from stefanctl.models.run_config import RunConfig
from stefanctl.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


class CheckService:
    def check(self, cfg: RunConfig) -> CheckReport:
        """Validate initial data, evaluate the gain assumptions and build the Lyapunov
        certificate. Nothing is simulated."""
        cfg = cfg.to_si()
        params, data, gains = cfg.params, cfg.initial, cfg.gains
        params.require_order(cfg.order)

        verdict = validate_initial(data, params, cfg.order)
        report = CheckReport(name=cfg.name, order=cfg.order, validation=verdict)
        if gains is None:
            logger.info(f"[{cfg.name}] No gains configured; gain checks skipped")
            return report

        try:
            if cfg.order == 2:
                gain_check = check_gains_2nd(gains, data, params)
            else:
                gain_check = check_gains_3rd(gains, data, params, cfg.analysis.setpoint_relaxation)
            report.gains = gain_check
        except ValidationError as exc:
            logger.warning(f"[{cfg.name}] Gain check failed: {exc.message}")
            report.errors.append(ErrorReport(error_code=exc.error_code, message=exc.message))

        try:
            report.certificate = certify(gains, params, cfg.analysis.lambda1, cfg.analysis.kappa2_grid)
        except ValidationError as exc:
            logger.warning(f"[{cfg.name}] No Lyapunov certificate: {exc.message}")
            report.errors.append(ErrorReport(error_code=exc.error_code, message=exc.message))

        failures = report.gating_failures()
        if failures:
            logger.warning(f"[{cfg.name}] Configuration violates: {', '.join(failures)}")
        return report


check_service = CheckService()
