"""Domain layer - Contains business entities and rules"""
