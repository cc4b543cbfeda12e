import sys

from hybridgbs.cli import main

sys.exit(main())
