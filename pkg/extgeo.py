"""
extgeo.py
---------
Entrypoint for the extgeo command line. Uses create_app() factory.

Run:
$ python extgeo.py check --spec data/specs/conformal.json --suite all
"""

import sys

from app import create_app


def main(argv=None) -> int:
    return create_app().run(argv)


if __name__ == "__main__":
    sys.exit(main())
