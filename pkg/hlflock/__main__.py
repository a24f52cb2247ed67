import sys

from hlflock.hlflock import main

sys.exit(main())
