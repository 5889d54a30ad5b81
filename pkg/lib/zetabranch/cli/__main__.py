import sys
import zetabranch.cli

if __name__ == '__main__':
    sys.exit(zetabranch.cli.main())
