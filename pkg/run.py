#!/usr/bin/env python3
"""Run the lstab command line."""
from lstab.main import main

if __name__ == "__main__":
    main()
