"""
Tests Package
=============
"""
