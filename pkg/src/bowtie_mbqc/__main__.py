import sys

from bowtie_mbqc.cli import main

sys.exit(main())
