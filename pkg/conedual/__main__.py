import sys

from conedual.cli import main

sys.exit(main())
