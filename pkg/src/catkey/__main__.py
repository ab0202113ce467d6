import sys

from catkey.cli import main

sys.exit(main())
