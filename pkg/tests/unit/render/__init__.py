"""Unit tests for the fieldcover render package."""
