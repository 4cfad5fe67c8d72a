from memflow.cli import main
import sys

sys.exit(main())
