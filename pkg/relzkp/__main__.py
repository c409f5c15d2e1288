import sys

from relzkp.relzkp import main

sys.exit(main())
