import sys

from unitalign.cli import main

sys.exit(main())
