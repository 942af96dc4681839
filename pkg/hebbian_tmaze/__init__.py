"""Evolved T-maze controllers with fitness-modulated Hebbian adaptation."""
