import sys

from hypstretch.cli import main

sys.exit(main())
