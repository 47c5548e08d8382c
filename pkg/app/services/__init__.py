"""Algorithms, one module per concern"""
