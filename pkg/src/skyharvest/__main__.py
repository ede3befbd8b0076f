import sys

from skyharvest.harness.cli import main

sys.exit(main())
