#!/usr/bin/env python3

'''
python3 -m sortkd <subcommand> [args...]

Forward to the ./sortkd-<subcommand> executable.
'''

import sys

from sortkd import import_path

SUBCOMMANDS = ['transform', 'inspect', 'verify', 'train', 'bench']

def main(argv):
    if len(argv) < 2 or argv[1] not in SUBCOMMANDS:
        print('usage: python3 -m sortkd {{{}}} [args...]'.format(','.join(SUBCOMMANDS)), file=sys.stderr)
        return 2
    import_path.import_path_main('sortkd-' + argv[1]).cli(argv[2:])

if __name__ == '__main__':
    sys.exit(main(sys.argv))
