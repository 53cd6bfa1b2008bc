"""
concurrex Test Suite
"""
