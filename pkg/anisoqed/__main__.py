import sys

from anisoqed.cli import main

sys.exit(main())
