"""Vogan varieties, vanishing cycles and the packets they cut out.

Worked examples ship as JSON bundles under ``voganish/data``; load one with
``load_bundle("so7")`` and check it with ``verify_all``.
"""

from .datasets import Bundle, bundle_ids, load_bundle, loads_bundle
from .errors import BundleError, InvariantError, VoganishError
from .runner import verify_all

__version__ = "0.1.0"

__all__ = ["Bundle", "BundleError", "InvariantError", "VoganishError", "bundle_ids", "load_bundle",
           "loads_bundle", "verify_all", "__version__"]
