"""Infrastructure layer - External service implementations"""
