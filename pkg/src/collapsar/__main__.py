import sys

from collapsar.cli import main

sys.exit(main())
