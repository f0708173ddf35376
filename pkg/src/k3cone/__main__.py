import sys

from k3cone.cli import main

sys.exit(main())
