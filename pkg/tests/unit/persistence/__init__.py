"""Unit tests for the fieldcover persistence package.""" 