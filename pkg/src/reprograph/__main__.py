import sys

from reprograph.cli import main

sys.exit(main())
