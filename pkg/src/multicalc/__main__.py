import sys

from multicalc.cli import main

sys.exit(main())
