from __future__ import annotations

import sys
from pathlib import Path


TESTS = Path(__file__).resolve().parent
ROOT = TESTS.parent

# descoord from the checkout; oracles and strategies as top-level helper modules
for path in (ROOT, TESTS):
    if str(path) not in sys.path:
        sys.path.insert(0, str(path))
