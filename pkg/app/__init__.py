"""Strategy-aware runtime verification toolkit for multi-agent game structures"""
