import sys

from condcw.cli import main

sys.exit(main())
