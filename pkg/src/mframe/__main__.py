import sys

from mframe.cli.main import main

sys.exit(main())
