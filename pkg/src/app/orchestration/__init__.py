"""Orchestration layer - Framework-specific orchestration logic"""
