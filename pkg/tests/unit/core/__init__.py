"""Unit tests for the fieldcover core package.""" 