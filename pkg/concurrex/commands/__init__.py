"""
Commands package - Contains all CLI command implementations.
"""
