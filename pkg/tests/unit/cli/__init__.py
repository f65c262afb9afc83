"""Unit tests for the fieldcover CLI package.""" 