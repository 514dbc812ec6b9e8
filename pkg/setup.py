#!/usr/bin/env python
# Licensed under a 3-clause BSD style license - see LICENSE.rst

# NOTE: The configuration for the package, including the name, version, and
# other information are set in the setup.cfg file.  The version is read at
# import time through importlib.metadata, so no version file is written.

import sys

from setuptools import setup

LEGACY_HELP = {
    "test": """
Note: tests are run with tox or pytest, not 'python setup.py test':

    tox -e test

or, for part of the suite:

    pip install -e .[test]
    pytest quantum_holonomy/tests/test_holonomy.py
""",
    "build_docs": """
Note: the documentation is built with tox or Sphinx, not 'python setup.py build_docs':

    tox -e build_docs

or:

    pip install -e .[docs]
    cd docs
    sphinx-build -b html . _build/html
""",
}
LEGACY_HELP["build_sphinx"] = LEGACY_HELP["build_docs"]

for command, message in LEGACY_HELP.items():
    if command in sys.argv:
        print(message)
        sys.exit(1)

setup(use_scm_version=True)
