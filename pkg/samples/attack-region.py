import logging
import aircon

from aircon.consensus import (
    ALPHA_STAR,
    Thresholds,
    attack_region,
)
from aircon.mark import important

aircon.basicConfig(format="%(message)s", level=logging.INFO)
logger = logging.getLogger()

logger.info("Tolerated malicious fraction: %s", important(
    '{0:.4f}'.format(ALPHA_STAR),
))
logger.info("Matching first threshold: %s", important(
    '{0:.4f}'.format(Thresholds.optimal().t_h1),
))

for alpha in (0.30, 0.35, 0.40, 0.45):
    region = attack_region(alpha)

    if region.safe:
        logger.info("alpha=%.2f: safe for every correlation", alpha)
    else:
        logger.info(
            "alpha=%.2f: conspirators win for rho in (%.3f, %.3f)",
            alpha,
            region.rho_0,
            region.rho_1,
        )
