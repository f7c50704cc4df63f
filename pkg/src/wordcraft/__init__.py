"""Keyword-mnemonic vocabulary learning service.

Per-word learning sessions walk three scaffolded stages: keyword selection
over brushed phoneme segments, association-map construction, and bounding-box
mental imagery that gates image generation on a fully activated recall path.
"""

__version__ = "0.1.0"

# Importing the stage modules registers their event appliers, which replay
# depends on.
from . import assoc as assoc  # noqa: F401
from . import canvas as canvas  # noqa: F401
from . import keywords as keywords  # noqa: F401
from . import session as session  # noqa: F401
