import sys

from gramdisp.cli import main

sys.exit(main())
