#!/usr/bin/env python3

import os
import sys
from glob import glob
from pprint import pprint
from setuptools import setup

setup_opts = {
    'name'                : 'zetabranch',
    # We change this default each time we tag a release.
    'version'             : '1.0.0',
    'description'         : "Branches, transfer operators and Selberg zeta functions of Fuchsian groups",
    'long_description'    : ('Builds Ford fundamental domains and auxiliary groups from a matrix presentation of a'
                             ' geometrically finite Fuchsian group, constructs and verifies sets of branches for the'
                             ' geodesic flow, and compares the Fredholm determinant of the resulting transfer operators'
                             ' with a truncated Selberg zeta function.'),
    'long_description_content_type': 'text/markdown',
    'author'              : 'Markizano Draconus',
    'author_email'        : 'support@markizano.net',
    'url'                 : 'https://markizano.net/',
    'license'             : 'GNU',

    'tests_require'       : ['pytest', 'hypothesis'],
    'install_requires'    : [
        'PyYAML>=6.0.1',
        'kizano<1.0.7',  # 1.0.7+ imports typing.Self (Python >= 3.11)
        'numpy',
        'scipy',
        'drawsvg>=2.0',
    ],
    'package_dir'         : { 'zetabranch': 'lib/zetabranch' },
    'packages'            : [
      'zetabranch',
      'zetabranch.geometry',
      'zetabranch.branches',
      'zetabranch.spectral',
      'zetabranch.cli',
    ],
    'scripts'             : glob('bin/*'),
    'entry_points': {
      'console_scripts': [
        'zb = zetabranch.cli:main'
      ],
    },
    'test_suite'          : 'tests',
}

try:
    import argparse
    HAS_ARGPARSE = True
except:
    HAS_ARGPARSE = False

if not HAS_ARGPARSE: setup_opts['install_requires'].append('argparse')

# I botch this too many times.
if len(sys.argv) > 1 and sys.argv[1] == 'test':
    sys.argv[1] = 'pytest'

if 'DEBUG' in os.environ: pprint(setup_opts)

setup(**setup_opts)
