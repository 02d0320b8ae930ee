#!/usr/bin/env python3
"""
Main entry point for the discord toolkit
Usage: python3 dh.py <discord|scan|verify> [options]
"""

import sys

from hdiscord.cli import main

if __name__ == "__main__":
    sys.exit(main())
