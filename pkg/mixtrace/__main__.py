"""python -m mixtrace"""
import sys

from mixtrace.cli import main

sys.exit(main())
