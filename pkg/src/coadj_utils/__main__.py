"""Allow ``python -m coadj_utils``."""

import sys

from .cli import main

sys.exit(main())
