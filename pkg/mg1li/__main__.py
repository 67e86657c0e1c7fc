""" python -m mg1li """
import sys

from mg1li.cli import main

sys.exit(main())

### END
