import sys

from dtwall.cli import main

sys.exit(main())
