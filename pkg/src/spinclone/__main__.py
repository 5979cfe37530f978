import sys

from spinclone.cli import main

sys.exit(main())
