import sys

from bectc.main import main

sys.exit(main())
