import logging
import aircon

from aircon.adversary import AdversaryStrategy
from aircon.channel import ChannelConfig
from aircon.consensus import (
    ConsensusContext,
    run_consensus,
)
from aircon.mark import important

aircon.basicConfig(format="%(message)s", level=logging.DEBUG)
logger = logging.getLogger()

context = ConsensusContext(channel=ChannelConfig(kind='epa', snr_db=10.0))
trace = run_consensus(7, 5, AdversaryStrategy('random'), context, seed=42)

logger.info("Final phases: %s", important(
    ', '.join(phase.name for phase in trace.final_phases()),
))
