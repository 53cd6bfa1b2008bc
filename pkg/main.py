#!/usr/bin/env python3
"""
Convenience wrapper for running from a checkout.
Use the 'concurrex' command instead after installation.
"""

from concurrex.cli import main

if __name__ == "__main__":
    main()
