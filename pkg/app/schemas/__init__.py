"""Pydantic wire formats"""
